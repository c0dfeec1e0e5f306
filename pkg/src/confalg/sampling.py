"""Seeded random samplers used by the property sweeps and the CLI.

Everything draws from a single :class:`random.Random`.  The draw order is
part of the contract, so a reimplementation can reproduce a sweep from the
seed if it follows it:

* coefficient: ``choice((-3, -2, -1, 1, 2, 3))``
* element of size N, degree cap g: for each cell (i, j) in row-major order,
  ``random() < 0.5`` decides whether it is nonzero; a nonzero cell draws
  ``randint(1, 2)`` terms, each as ``d = randint(0, g)``, ``p = randint(0, d)``,
  ``q = d - p`` (term D^p x^q) and then a coefficient.  A cell whose terms
  cancel stays zero.
* tuple of k elements: ``N = randint(1, size)`` once, then k elements.
* Poly1 of degree cap g: ``d = randint(0, g)``, then for e = 0..d a draw
  ``random() < 0.6`` and a coefficient when it succeeds; the leading
  coefficient is always drawn.
"""

from __future__ import annotations

import random
from typing import Optional

from .core import ConformalElement
from .exactpoly import Poly1, PolyMatrix, mat_det, rat
from .oracles.residue import DistSymbol, Matrix
from .oracles.weyl import VNElement

COEFFS = (-3, -2, -1, 1, 2, 3)


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def coeff(rng: random.Random) -> int:
    return rng.choice(COEFFS)


def poly1(rng: random.Random, deg: int, var: str = "x") -> Poly1:
    d = rng.randint(0, deg)
    c = {}
    for e in range(d):
        if rng.random() < 0.6:
            c[e] = coeff(rng)
    c[d] = coeff(rng)
    return Poly1(c, var)


def element(rng: random.Random, n: int, deg: int, x_free: bool = False) -> ConformalElement:
    terms: dict[tuple[int, int, int, int], int] = {}
    for i in range(n):
        for j in range(n):
            if rng.random() >= 0.5:
                continue
            for _ in range(rng.randint(1, 2)):
                d = rng.randint(0, deg)
                p = d if x_free else rng.randint(0, d)
                key = (i, j, p, d - p)
                terms[key] = terms.get(key, 0) + coeff(rng)
    return ConformalElement(n, terms)


def element_tuple(rng: random.Random, k: int, size: int, deg: int, x_free: bool = False) -> list[ConformalElement]:
    n = rng.randint(1, size)
    return [element(rng, n, deg, x_free) for _ in range(k)]


def polymatrix(rng: random.Random, n: int, deg: int, var: str = "t", density: float = 0.7) -> PolyMatrix:
    z = Poly1({}, var)
    return PolyMatrix(
        [[poly1(rng, deg, var) if rng.random() < density else z for _ in range(n)] for _ in range(n)]
    )


def nonsingular(rng: random.Random, n: int, deg: int, var: str = "t", tries: int = 100) -> PolyMatrix:
    for _ in range(tries):
        q = polymatrix(rng, n, deg, var)
        if mat_det(q):
            return q
    return PolyMatrix.diag([poly1(rng, deg, var) for _ in range(n)])


def unimodular(rng: random.Random, n: int, var: str = "t", steps: int = 4, deg: int = 2) -> PolyMatrix:
    """Product of random elementary matrices (row additions, swaps, constant scalings)."""
    one = Poly1.const(1, var)
    m = PolyMatrix.identity(n, one)
    for _ in range(steps):
        kind = rng.randint(0, 2) if n > 1 else 2
        e = [list(r) for r in PolyMatrix.identity(n, one).entries]
        if kind == 0:
            i, j = rng.sample(range(n), 2)
            e[i][j] = poly1(rng, deg, var)
        elif kind == 1:
            i, j = rng.sample(range(n), 2)
            e[i], e[j] = e[j], e[i]
        else:
            i = rng.randrange(n)
            e[i][i] = Poly1.const(coeff(rng), var)
        m = m * PolyMatrix(e)
    return m


def const_matrix(rng: random.Random, n: int, zero_prob: float = 0.3) -> Matrix:
    return tuple(tuple(rat(0 if rng.random() < zero_prob else coeff(rng)) for _ in range(n)) for _ in range(n))


def symbol(rng: random.Random, n: int, deg: int, shift_range: int = 2) -> DistSymbol:
    w = poly1(rng, deg, "n")
    return DistSymbol(w, const_matrix(rng, n), rng.randint(-shift_range, shift_range))


def vn_element(rng: random.Random, n: int, deg: int) -> VNElement:
    return VNElement.of(*[poly1(rng, deg, "D") if rng.random() < 0.8 else Poly1({}, "D") for _ in range(n)])


def member(rng: random.Random, spec, deg: int) -> ConformalElement:
    """A random element of the algebra described by ``spec`` (an AlgebraSpec)."""
    from .algebras import Kind

    if spec.kind is Kind.CEND:
        return element(rng, spec.n, deg)
    if spec.kind is Kind.CURR:
        return element(rng, spec.n, deg, x_free=True)
    m = element(rng, spec.n, deg)
    return m.matmul(spec.q_embedded())


def seed_or_default(seed: Optional[int]) -> int:
    return 0 if seed is None else seed
