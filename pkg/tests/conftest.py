from __future__ import annotations

from importlib import resources

import pytest

from ostrans import parse_spec, translate_algebra


def _fixture_text(name: str) -> str:
    return (resources.files("ostrans") / "fixtures" / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def imp_text() -> str:
    return _fixture_text("imp.osa")


@pytest.fixture(scope="session")
def imp(imp_text):
    return parse_spec(imp_text)


@pytest.fixture(scope="session")
def imp_real():
    return parse_spec(_fixture_text("imp_real.osa"))


@pytest.fixture(scope="session")
def imp_translated(imp):
    return translate_algebra(imp)


@pytest.fixture(scope="session")
def imp_real_translated(imp_real):
    return translate_algebra(imp_real)
