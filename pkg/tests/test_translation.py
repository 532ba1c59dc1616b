from __future__ import annotations

import random

import pytest

from gen_algebras import random_algebra
from ostrans import (
    Equation,
    GroundTerm,
    NoPath,
    NotStrictlySensible,
    Operator,
    OSAlgebra,
    OSSignature,
    PNode,
    RenameCollision,
    Rule,
    UntranslatableSort,
    Var,
    build_poset,
    core_canonicalize,
    enumerate_ground_terms,
    generate_cast_operators,
    generate_core_equations,
    least_sort,
    ms_sort,
    rename_constructors,
    select_representatives,
    strip_casts,
    translate_algebra,
    translate_term,
)

G = GroundTerm
ZERO = G("0")

EXPECTED_CASTS = [
    "Cast_Block_to_Stmt",
    "Cast_Id_to_AExp",
    "Cast_bool_to_BExp",
    "Cast_int_to_AExp",
    "Cast_nat_to_int",
]


def _cast(name, inner):
    return PNode(name, (inner,)) if not isinstance(inner, GroundTerm) else G(name, (inner,))


def test_select_representatives_imp(imp):
    reduced, reps = select_representatives(imp)
    assert len(reduced) == 21
    plus_reps = {reps[op] for op in imp.signature.ops_named("+")}
    assert plus_reps == {
        Operator("+", ("AExp", "AExp"), "AExp"),
        Operator("+", ("BExp", "BExp"), "BExp"),
    }
    minus_reps = {reps[op] for op in imp.signature.ops_named("-")}
    assert minus_reps == {
        Operator("-", ("int",), "int"),
        Operator("-", ("BExp",), "BExp"),
    }
    singleton = Operator("guess", ("Id",), "int")
    assert reps[singleton] == singleton


def test_select_representatives_refuses_non_strict(imp):
    ops = [
        Operator("+", ("nat", "nat"), "nat") if op == Operator("+", ("nat", "nat"), "AExp") else op
        for op in imp.signature.operators
    ]
    sig = OSSignature(imp.signature.sorts, imp.signature.subsort_pairs, ops)
    with pytest.raises(NotStrictlySensible):
        select_representatives(OSAlgebra(sig, (), ()))


def test_rename_constructors_imp(imp):
    reduced, _ = select_representatives(imp)
    renames = rename_constructors(reduced, taken=imp.signature.constructors)
    assert renames[Operator("+", ("AExp", "AExp"), "AExp")] == "+AExp"
    assert renames[Operator("+", ("BExp", "BExp"), "BExp")] == "+BExp"
    assert renames[Operator("-", ("int",), "int")] == "-int"
    assert renames[Operator("-", ("BExp",), "BExp")] == "-BExp"
    assert renames[Operator("guess", ("Id",), "int")] == "guess"


def test_rename_constructors_falls_back_to_argument_sorts():
    # Same constructor, same target, incompatible argument sorts: the
    # second operator's target suffix collides with the first's, so its
    # argument list disambiguates.
    ops = (Operator("f", ("a",), "t"), Operator("f", ("b",), "t"))
    renames = rename_constructors(ops)
    assert renames[Operator("f", ("a",), "t")] == "ft"
    assert renames[Operator("f", ("b",), "t")] == "ft_b"


def test_rename_constructors_collision_is_an_error():
    ops = (Operator("f", ("a",), "t"), Operator("f", ("b",), "t"))
    with pytest.raises(RenameCollision):
        rename_constructors(ops, taken=frozenset({"ft_a", "ft_b"}))


def test_generate_cast_operators_imp(imp):
    casts = generate_cast_operators(imp.signature.poset)
    assert sorted(op.constructor for op in casts.values()) == EXPECTED_CASTS
    assert casts[("nat", "int")] == Operator("Cast_nat_to_int", ("nat",), "int")


def test_generate_cast_operators_edges():
    assert generate_cast_operators(build_poset(["a"], [])) == {}
    single = generate_cast_operators(build_poset(["a", "b"], [("a", "b")]))
    assert single == {("a", "b"): Operator("Cast_a_to_b", ("a",), "b")}
    with pytest.raises(RenameCollision):
        generate_cast_operators(build_poset(["a", "b"], [("a", "b")]),
                                reserved=frozenset({"Cast_a_to_b"}))


def test_canonical_path_choice(imp_translated, imp_real_translated):
    _, tm = imp_translated
    assert tm.canonical_path("nat", "AExp") == ("nat", "int", "AExp")
    _, tmr = imp_real_translated
    assert tmr.canonical_path("nat", "AExp") == ("nat", "int", "AExp")
    with pytest.raises(NoPath):
        tm.canonical_path("bool", "AExp")


def test_canonical_path_revlex(imp_real):
    _, tm = translate_algebra(imp_real, tie_break="revlex")
    assert tm.canonical_path("nat", "AExp") == ("nat", "real", "AExp")


def test_translate_term_equation_side(imp_translated):
    _, tm = imp_translated
    side = PNode("+", (PNode("s", (Var("A", "nat"),)), Var("B", "nat")))
    chain = lambda inner: PNode("Cast_int_to_AExp", (PNode("Cast_nat_to_int", (inner,)),))
    expected = PNode("+AExp", (
        chain(PNode("s", (Var("A", "nat"),))),
        chain(Var("B", "nat")),
    ))
    assert translate_term(tm, side) == expected


def test_translate_term_no_cast_when_sorts_match(imp_translated):
    _, tm = imp_translated
    assert translate_term(tm, ZERO, expected="nat") is ZERO


def test_translate_term_single_pair_chain(imp_translated):
    _, tm = imp_translated
    assert translate_term(tm, G("true"), expected="BExp") is G(
        "Cast_bool_to_BExp", (G("true"),)
    )


def test_translate_term_unrelated_expected_sort(imp_translated):
    _, tm = imp_translated
    with pytest.raises(UntranslatableSort):
        translate_term(tm, G("true"), expected="nat")


def test_core_equations_imp_empty(imp_translated):
    _, tm = imp_translated
    assert generate_core_equations(tm) == ()


def test_core_equations_real_extension(imp_real_translated):
    ms, tm = imp_real_translated
    core = generate_core_equations(tm)
    var = Var("A", "nat")
    expected = Equation(
        PNode("Cast_int_to_AExp", (PNode("Cast_nat_to_int", (var,)),)),
        PNode("Cast_real_to_AExp", (PNode("Cast_nat_to_real", (var,)),)),
    )
    assert core == (expected,)
    assert ms.core_equations == frozenset((expected,))


def test_core_equations_chain_only():
    sig = OSSignature(["a", "b", "c"], [("a", "b"), ("b", "c")], [Operator("k", (), "a")])
    _, tm = translate_algebra(OSAlgebra(sig, (), ()))
    assert generate_core_equations(tm) == ()


def test_core_equation_bound_on_complete_dag():
    # Densest eight-sort case: every forward pair declared.  One witness
    # per diverging first edge gives C(8,3) equations, still below 64.
    names = [f"s{i}" for i in range(8)]
    pairs = [(names[i], names[j]) for i in range(8) for j in range(i + 1, 8)]
    sig = OSSignature(names, pairs, ())
    from ostrans import TranslationMap, compute_canonical_paths
    tm = TranslationMap(
        source=sig,
        tie_break="lex",
        representative_of={},
        rename_of={},
        casts=generate_cast_operators(sig.poset),
        canonical_path_of=compute_canonical_paths(sig.poset, "lex"),
    )
    core = generate_core_equations(tm)
    assert len(core) == 56
    assert len(core) < len(names) ** 2


def test_translate_equations_goldens(imp, imp_translated):
    ms, tm = imp_translated
    by_source = dict(zip(imp.equations, ms.equations))
    double_neg = Equation(PNode("-", (PNode("-", (Var("A", "int"),)),)), Var("A", "int"))
    assert by_source[double_neg] == Equation(
        PNode("-int", (PNode("-int", (Var("A", "int"),)),)), Var("A", "int")
    )
    left_id = Equation(PNode("+", (PNode("0", ()), Var("A", "AExp"))), Var("A", "AExp"))
    assert by_source[left_id] == Equation(
        PNode("+AExp", (
            PNode("Cast_int_to_AExp", (PNode("Cast_nat_to_int", (PNode("0", ()),)),)),
            Var("A", "AExp"),
        )),
        Var("A", "AExp"),
    )


def test_translate_rules_goldens(imp, imp_translated):
    ms, tm = imp_translated
    by_source = dict(zip(imp.rules, ms.rules))
    neg_zero = Rule(PNode("-", (PNode("0", ()),)), PNode("0", ()))
    translated = by_source[neg_zero]
    # The right side is cast up to the left side's sort; the left argument
    # position likewise needs its cast (int demanded, nat provided).
    assert translated.rhs == PNode("Cast_nat_to_int", (PNode("0", ()),))
    assert translated.lhs == PNode("-int", (PNode("Cast_nat_to_int", (PNode("0", ()),)),))

    neg_true = Rule(PNode("-", (PNode("true", ()),)), PNode("false", ()))
    assert by_source[neg_true] == Rule(
        PNode("-BExp", (PNode("Cast_bool_to_BExp", (PNode("true", ()),)),)),
        PNode("Cast_bool_to_BExp", (PNode("false", ()),)),
    )


def test_translate_algebra_imp_counts(imp, imp_translated):
    ms, tm = imp_translated
    assert ms.signature.sorts == imp.signature.sorts
    assert len(ms.signature.sorts) == 10
    assert len(ms.signature.operators) == 26
    assert len(ms.signature.non_core) == 5
    assert len(ms.equations) == len(imp.equations) == 17
    assert len(ms.core_equations) == 0
    assert len(ms.rules) == len(imp.rules) == 13


def test_translate_algebra_real_counts(imp_real, imp_real_translated):
    ms, _ = imp_real_translated
    assert len(ms.equations) == len(imp_real.equations) + 1


def test_translate_algebra_empty_subsorts():
    sig = OSSignature(
        ["a", "b"], [],
        [Operator("c", (), "a"), Operator("f", ("a",), "b")],
    )
    alg = OSAlgebra(sig, (Equation(PNode("f", (Var("x", "a"),)), PNode("f", (Var("x", "a"),))),), ())
    ms, tm = translate_algebra(alg)
    assert ms.signature.non_core == frozenset()
    assert {op.constructor for op in ms.signature.operators} == {"c", "f"}
    assert len(ms.equations) == len(alg.equations)


def test_translated_overloads_were_incompatible_at_source(imp_translated, imp):
    # Any two surviving operators from one source constructor must differ
    # at a position whose sorts share no supersort in the source order.
    ms, tm = imp_translated
    poset = imp.signature.poset
    core_ops = [op for op in ms.signature.operators if op not in ms.signature.non_core]
    by_original: dict[str, list[Operator]] = {}
    for op in core_ops:
        by_original.setdefault(tm.original_name_of[op.constructor], []).append(op)
    for group in by_original.values():
        for i, f in enumerate(group):
            for g in group[i + 1:]:
                assert any(
                    not poset.common_supersort_exists(a, b)
                    for a, b in zip(f.arg_sorts, g.arg_sorts)
                )


def test_translation_target_sort_matches_least_sort(imp, imp_translated):
    ms, tm = imp_translated
    for t in enumerate_ground_terms(imp.signature, depth=2):
        assert ms_sort(ms.signature, translate_term(tm, t)) == least_sort(imp.signature, t)


def test_strip_casts_round_trip(imp, imp_translated):
    _, tm = imp_translated
    for t in enumerate_ground_terms(imp.signature, depth=2):
        assert strip_casts(tm, translate_term(tm, t)) is t


def test_tie_break_independence_small(imp_real):
    ms_a, tm_a = translate_algebra(imp_real, tie_break="lex")
    ms_b, tm_b = translate_algebra(imp_real, tie_break="revlex")
    for t in enumerate_ground_terms(imp_real.signature, depth=2):
        lhs = core_canonicalize(tm_a, translate_term(tm_a, t))
        rhs = core_canonicalize(tm_a, translate_term(tm_b, t))
        assert lhs is rhs


def test_rule_and_equation_counts_on_random_algebras():
    rng = random.Random(411)
    for _ in range(25):
        alg = random_algebra(rng)
        ms, tm = translate_algebra(alg)
        assert len(ms.rules) == len(alg.rules)
        assert len(ms.equations) == len(alg.equations) + len(ms.core_equations)
        assert ms.signature.sorts == alg.signature.sorts
