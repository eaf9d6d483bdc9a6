import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from stringy_orbifold.ering import EPoly, ERat

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


small_exponent = st.integers(-3, 3)
half_exponent = st.integers(-6, 6).map(lambda n: Fraction(n, 2))


@st.composite
def epolys(draw, exponents=small_exponent, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        key = (draw(exponents), draw(exponents))
        terms[key] = draw(st.integers(-5, 5))
    return EPoly(terms)


@st.composite
def lefschetz_epolys(draw, max_terms=4):
    """Polynomials in L alone (p == q), nonnegative exponents."""
    n = draw(st.integers(0, max_terms))
    return EPoly({(e, e): c for e, c in ((draw(st.integers(0, 3)), draw(st.integers(-4, 4))) for _ in range(n))})


FACTOR_POOL = [1, 2, 3, Fraction(1, 2)]


@st.composite
def erats(draw, numerators=None):
    num = draw(numerators if numerators is not None else epolys())
    factors = draw(st.lists(st.sampled_from(FACTOR_POOL), max_size=3))
    return ERat(num, factors)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
