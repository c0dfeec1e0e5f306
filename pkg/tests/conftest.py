from __future__ import annotations

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from confalg.core import ConformalElement, parse_element
from confalg.exactpoly import Poly1, Poly2, PolyMatrix, parse_poly1

settings.register_profile("ci", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")

small_coeff = st.integers(-4, 4)


def el(text: str) -> ConformalElement:
    """Shorthand: a bare polynomial means a 1x1 element."""
    if not text.lstrip().startswith("N="):
        text = f"N=1; [1,1]: {text}"
    return parse_element(text)


def pm(rows: list[list[str]], var: str = "t") -> PolyMatrix:
    return PolyMatrix([[parse_poly1(c, var) for c in r] for r in rows])


@st.composite
def poly1s(draw, var: str = "x", max_deg: int = 4) -> Poly1:
    return Poly1(draw(st.lists(small_coeff, max_size=max_deg + 1)), var)


@st.composite
def poly2s(draw, max_deg: int = 3) -> Poly2:
    keys = st.tuples(st.integers(0, max_deg), st.integers(0, max_deg))
    return Poly2(draw(st.dictionaries(keys, small_coeff, max_size=5)))


@st.composite
def elements(draw, n: int | None = None, max_deg: int = 3) -> ConformalElement:
    if n is None:
        n = draw(st.integers(1, 2))
    key = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, max_deg), st.integers(0, max_deg))
    return ConformalElement(n, draw(st.dictionaries(key, small_coeff, max_size=4)))


@st.composite
def element_tuples(draw, k: int, max_deg: int = 3):
    n = draw(st.integers(1, 2))
    return [draw(elements(n, max_deg)) for _ in range(k)]


@st.composite
def polymatrices(draw, n: int, var: str = "t", max_deg: int = 2) -> PolyMatrix:
    return PolyMatrix([[draw(poly1s(var, max_deg)) for _ in range(n)] for _ in range(n)])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
