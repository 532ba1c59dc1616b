"""Translate strictly sensible order-sorted algebras into many-sorted
ones, and validate the pair empirically under a rewriting engine."""

from .bisim import (
    BisimConfig,
    BisimReport,
    Counterexample,
    check_backward,
    check_forward,
    enumerate_ground_terms,
    run_bisim,
)
from .errors import (
    AlgebraError,
    AmbiguousSort,
    BudgetExceeded,
    CastNameReserved,
    CycleDetected,
    DuplicateDeclaration,
    IllFormedTerm,
    InconsistentAnnotation,
    InvalidSignature,
    NoPath,
    NotStrictlySensible,
    RenameCollision,
    SortViolation,
    SpecError,
    SpecSyntaxError,
    SpecUnknownSort,
    UnboundVariable,
    UnknownSort,
    UntranslatableSort,
)
from .poset import Diamond, SortPoset, build_poset, choose_canonical, find_diamonds
from .rewrite import (
    CastTable,
    EClassApprox,
    Position,
    RewriteConfig,
    RewriteStep,
    cast_table,
    core_canonicalize,
    direct_steps,
    e_class_bounded,
    format_trace,
    match_pattern,
    positions,
    replace_at,
    rewrite_step,
    rewrite_trace,
    subterm_at,
)
from .specfmt import SpecDocument, parse_spec, parse_term_text, print_spec
from .terms import (
    Algebra,
    Equation,
    GroundTerm,
    MSAlgebra,
    MSSignature,
    Operator,
    OSAlgebra,
    OSSignature,
    Pattern,
    PNode,
    Rule,
    Signature,
    Sort,
    Substitution,
    Term,
    Var,
    apply_substitution,
    least_sort,
    ms_sort,
    print_term,
    sorts_of,
    term_sort,
    variables_of,
    well_formed_ground,
)
from .translate import (
    TranslationMap,
    canonical_path,
    compute_canonical_paths,
    cast_name,
    generate_cast_operators,
    generate_core_equations,
    is_reserved_name,
    rename_constructors,
    select_representatives,
    strip_casts,
    translate_algebra,
    translate_equations,
    translate_rules,
    translate_term,
)
from .validity import (
    ValidityReport,
    argument_compatible,
    check_equations_sort_equal,
    check_maximal_argument_bounding,
    check_rules_sort_decreasing,
    check_sensible,
    check_strong_sensible,
    validate_algebra,
)

__version__ = "0.1.0"
