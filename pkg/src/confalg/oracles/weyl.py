"""Operator realization of Cend_N inside M_N(W), W the first Weyl algebra.

A D-free element A(x) acts on V_N = k[D]^N by ``A(x)(D^k): u -> A(D) ∂_D^k u``;
D-multiples follow ``(D a)(h) = -a(∂_D h)``, so that for a monomial

    realize(D^p x^q E, k) = (-1)^p [k]_p D^q ∂_D^(k-p) E.

Nothing here calls the closed product formula of :mod:`confalg.core`
except to produce the element whose realization is being compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional, Sequence

from gmpy2 import mpq

from ..core import ConformalElement, curly_product, n_product
from ..exactpoly import Poly1, ShapeError, falling, rat


class WeylOperator:
    """Normal-ordered element Σ c_ij D^i ∂_D^j of the first Weyl algebra."""

    __slots__ = ("_c",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        c: dict[tuple[int, int], mpq] = {}
        for k, v in (terms or {}).items():
            v = rat(v)
            if v:
                c[k] = c.get(k, 0) + v
        self._c = {k: v for k, v in c.items() if v}

    @classmethod
    def D(cls) -> WeylOperator:
        return cls({(1, 0): 1})

    @classmethod
    def d(cls) -> WeylOperator:
        """∂_D"""
        return cls({(0, 1): 1})

    @classmethod
    def one(cls) -> WeylOperator:
        return cls({(0, 0): 1})

    def terms(self) -> dict[tuple[int, int], mpq]:
        return dict(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def __add__(self, other: WeylOperator) -> WeylOperator:
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return WeylOperator(c)

    def __sub__(self, other: WeylOperator) -> WeylOperator:
        return self + other.scale(-1)

    def scale(self, s) -> WeylOperator:
        s = rat(s)
        return WeylOperator({k: v * s for k, v in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, WeylOperator):
            return weyl_mul(self, other)
        return self.scale(other)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylOperator) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def apply(self, f: Poly1) -> Poly1:
        acc: dict[int, mpq] = {}
        for (i, j), c in self._c.items():
            for e, v in f.items():
                if e >= j:
                    k = e - j + i
                    acc[k] = acc.get(k, 0) + c * v * falling(e, j)
        return Poly1(acc, "D")

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in sorted(self._c.items(), reverse=True):
            mono = "*".join(
                s for s in (("D" if i == 1 else f"D^{i}") if i else "", ("d" if j == 1 else f"d^{j}") if j else "") if s
            )
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def weyl_mul(a: WeylOperator, b: WeylOperator) -> WeylOperator:
    """Product re-normal-ordered with ∂_D^j D^k = Σ_r C(j, r) [k]_r D^(k-r) ∂_D^(j-r)."""
    out: dict[tuple[int, int], mpq] = {}
    for (i, j), u in a._c.items():
        for (k, l), v in b._c.items():
            for r in range(min(j, k) + 1):
                key = (i + k - r, j - r + l)
                out[key] = out.get(key, 0) + u * v * (math.comb(j, r) * falling(k, r))
    return WeylOperator(out)


@dataclass(frozen=True)
class VNElement:
    """Vector in V_N = k[D]^N."""

    coords: tuple[Poly1, ...]

    def __post_init__(self):
        if any(c.var != "D" for c in self.coords):
            raise ValueError("coordinates must be polynomials in D")

    @classmethod
    def of(cls, *coords) -> VNElement:
        return cls(tuple(c if isinstance(c, Poly1) else Poly1.const(c, "D") for c in coords))

    @classmethod
    def basis(cls, n: int, l: int, degree: int = 0) -> VNElement:
        """D^degree e_l (0-based l)."""
        z = Poly1({}, "D")
        return cls(tuple(Poly1.monomial(degree, 1, "D") if i == l else z for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def degree(self) -> int:
        return max((c.degree for c in self.coords if c), default=-1)

    def __add__(self, other: VNElement) -> VNElement:
        return VNElement(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: VNElement) -> VNElement:
        return VNElement(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def scale(self, c) -> VNElement:
        return VNElement(tuple(a * c for a in self.coords))

    def mul_D(self, k: int = 1) -> VNElement:
        m = Poly1.monomial(k, 1, "D")
        return VNElement(tuple(a * m for a in self.coords))

    def is_zero(self) -> bool:
        return all(not c for c in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


class WeylMatrix:
    """N×N matrix of Weyl operators acting on V_N."""

    __slots__ = ("n", "cells")

    def __init__(self, n: int, cells: Mapping[tuple[int, int], WeylOperator] | None = None):
        self.n = n
        self.cells = {k: v for k, v in (cells or {}).items() if v}

    @classmethod
    def identity(cls, n: int) -> WeylMatrix:
        return cls(n, {(i, i): WeylOperator.one() for i in range(n)})

    def __add__(self, other: WeylMatrix) -> WeylMatrix:
        cells = dict(self.cells)
        for k, v in other.cells.items():
            cells[k] = cells[k] + v if k in cells else v
        return WeylMatrix(self.n, cells)

    def scale(self, c) -> WeylMatrix:
        return WeylMatrix(self.n, {k: v.scale(c) for k, v in self.cells.items()})

    def __mul__(self, other: WeylMatrix) -> WeylMatrix:
        cells: dict[tuple[int, int], WeylOperator] = {}
        for (i, l), u in self.cells.items():
            for (l2, k), v in other.cells.items():
                if l == l2:
                    p = weyl_mul(u, v)
                    cells[(i, k)] = cells[(i, k)] + p if (i, k) in cells else p
        return WeylMatrix(self.n, cells)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylMatrix) and self.n == other.n and self.cells == other.cells

    def __str__(self) -> str:
        return "; ".join(f"[{i + 1},{j + 1}]: {op}" for (i, j), op in sorted(self.cells.items())) or "0"


def realize(a: ConformalElement, h_power: int) -> WeylMatrix:
    """The operator a(D^h_power) as a matrix over the Weyl algebra."""
    cells: dict[tuple[int, int], dict] = {}
    k = h_power
    for (i, j, p, q), c in a.terms().items():
        if p > k:
            continue
        coef = c * ((-1) ** p * falling(k, p))
        cell = cells.setdefault((i, j), {})
        key = (q, k - p)
        cell[key] = cell.get(key, 0) + coef
    return WeylMatrix(a.n, {ij: WeylOperator(t) for ij, t in cells.items()})


def apply(opmat: WeylMatrix, v: VNElement) -> VNElement:
    if opmat.n != v.n:
        raise ShapeError(f"operator size {opmat.n} vs vector size {v.n}")
    out = [Poly1({}, "D") for _ in range(v.n)]
    for (i, j), op in opmat.cells.items():
        if v.coords[j]:
            out[i] = out[i] + op.apply(v.coords[j])
    return VNElement(tuple(out))


@dataclass(frozen=True)
class OracleCheck:
    a: ConformalElement
    b: ConformalElement
    n: int
    m: int
    probe: Optional[VNElement]
    lhs: VNElement | WeylMatrix
    rhs: VNElement | WeylMatrix

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self) -> bool:
        return self.ok

    def report(self) -> str:
        status = "ok" if self.ok else "MISMATCH"
        return (
            f"oracle n={self.n} m={self.m} probe={self.probe}: {status}; "
            f"a={self.a}; b={self.b}; lhs={self.lhs}; rhs={self.rhs}"
        )


def oracle_check_product(
    a: ConformalElement, b: ConformalElement, n: int, m: int, probes: Sequence[VNElement]
) -> Optional[OracleCheck]:
    """Compare realize(a (n) b, m) with Σ_s (-1)^s C(n,s) a(D^(n-s)) b(D^(m+s)) on probes.

    Returns None when every probe agrees, otherwise the first discrepancy.
    """
    if a.n != b.n:
        raise ShapeError("size mismatch")
    lhs_op = realize(n_product(a, b, n), m)
    right = [(((-1) ** s) * math.comb(n, s), realize(a, n - s), realize(b, m + s)) for s in range(n + 1)]
    for v in probes:
        if v.n != a.n:
            raise ShapeError("probe size mismatch")
        lhs = apply(lhs_op, v)
        rhs = VNElement(tuple(Poly1({}, "D") for _ in range(a.n)))
        for c, ra, rb in right:
            rhs = rhs + apply(ra, apply(rb, v)).scale(c)
        if lhs != rhs:
            return OracleCheck(a, b, n, m, v, lhs, rhs)
    return None


def operator_check_product(a: ConformalElement, b: ConformalElement, n: int, m: int) -> OracleCheck:
    """Same comparison as :func:`oracle_check_product` but as exact Weyl-matrix products."""
    lhs = realize(n_product(a, b, n), m)
    rhs = WeylMatrix(a.n)
    for s in range(n + 1):
        rhs = rhs + (realize(a, n - s) * realize(b, m + s)).scale(((-1) ** s) * math.comb(n, s))
    return OracleCheck(a, b, n, m, None, lhs, rhs)


# ---------------------------------------------------------------------------
# A_0: left 0-multiplication operators


class ZeroMult:
    """The operator a(0): x -> a (0) x on Cend_N."""

    def __init__(self, a: ConformalElement):
        self.a = a

    def __call__(self, x: ConformalElement) -> ConformalElement:
        return n_product(self.a, x, 0)

    def then(self, other: ZeroMult) -> Callable[[ConformalElement], ConformalElement]:
        """Composition self∘other, i.e. x -> a(0)(b(0)(x))."""
        return lambda x: self(other(x))


def zero_mult_operator(a: ConformalElement) -> ZeroMult:
    return ZeroMult(a)


# ---------------------------------------------------------------------------
# anti-isomorphism Cend^l -> Cend^r, checked on operator families
#
# A family F maps (k, v) to F(D^k)(v).  Every family below vanishes for
# k > bound(v); the bound keeps every "Σ_{s>=0}" finite.

Family = Callable[[int, VNElement], VNElement]


def _zero_vec(n: int) -> VNElement:
    return VNElement(tuple(Poly1({}, "D") for _ in range(n)))


def _act(a: ConformalElement, k: int, v: VNElement) -> VNElement:
    return apply(realize(a, k), v)


def tilde(F: Family, bound: Callable[[VNElement], int], n: int) -> Family:
    """F~(D^k) = Σ_t (-1)^(k+t) D^(t) F(D^(k+t)); the same rule inverts it."""

    @lru_cache(maxsize=None)
    def G(k: int, v: VNElement) -> VNElement:
        acc = _zero_vec(n)
        for t in range(max(0, bound(v) - k + 1)):
            w = F(k + t, v)
            if not w.is_zero():
                acc = acc + w.mul_D(t).scale(mpq((-1) ** (k + t), math.factorial(t)))
        return acc

    return G


def _degs(a: ConformalElement) -> tuple[int, int]:
    if not a:
        return 0, 0
    return int(a.deg_D), int(a.deg_x)


def anti_iso_families(a: ConformalElement, b: ConformalElement, n: int):
    """Return (lhs, rhs, bound) families for  a~ (n) b~  and  ({b (n) a})~.

    The right-module n-product on Cend^r is read off the right associativity
    v (k) (f (n) g) = Σ_s C(k, s) (v (k-s) f) (n+s) g  with v (k) f = f(D^k)(v).
    """
    N = a.n
    pa, qa = _degs(a)
    pb, qb = _degs(b)

    def bound(v: VNElement) -> int:
        return max(v.degree, 0) + pa + pb + qa + qb + 1

    left_a = lru_cache(maxsize=None)(lambda k, v: _act(a, k, v))
    left_b = lru_cache(maxsize=None)(lambda k, v: _act(b, k, v))
    ta = tilde(left_a, lambda v: max(v.degree, 0) + pa, N)
    tb = tilde(left_b, lambda v: max(v.degree, 0) + pb, N)

    @lru_cache(maxsize=None)
    def lhs(k: int, v: VNElement) -> VNElement:
        acc = _zero_vec(N)
        for s in range(k + 1):
            w = ta(k - s, v)
            if not w.is_zero():
                acc = acc + tb(n + s, w).scale(math.comb(k, s))
        return acc

    c = curly_product(b, a, n)
    rhs = tilde(lru_cache(maxsize=None)(lambda k, v: _act(c, k, v)), bound, N)
    return lhs, rhs, bound, c


def decode_left_family(F: Family, n: int, K: int) -> ConformalElement:
    """Recover the element c with F(D^k) = realize(c, k), assuming deg_D(c) <= K.

    F(D^K) = Σ_p (-1)^p [K]_p C_p(D) ∂_D^(K-p); the operator coefficients of
    ∂_D^j are read off the probes D^i e_l, i = 0..K, by triangular solving.
    """
    terms: dict[tuple[int, int, int, int], mpq] = {}
    for l in range(n):
        W: list[VNElement] = []
        for i in range(K + 1):
            val = F(K, VNElement.basis(n, l, i))
            for j, wj in enumerate(W):
                val = val - wj.mul_D(i - j).scale(falling(i, j))
            W.append(val.scale(mpq(1, math.factorial(i))))
        for p in range(K + 1):
            col = W[K - p].scale(mpq((-1) ** p, falling(K, p)))
            for i, poly in enumerate(col.coords):
                for q, v in poly.items():
                    terms[(i, l, p, q)] = v
    return ConformalElement(n, terms)


def anti_iso_sides(
    a: ConformalElement, b: ConformalElement, n: int
) -> tuple[ConformalElement, ConformalElement]:
    """Pull  a~ (n) b~  back through the inverse tilde map and decode it.

    The returned pair is (decoded left side, {b (n) a}); they coincide exactly
    when the operator families agree.
    """
    if a.n != b.n:
        raise ShapeError("size mismatch")
    lhs, _, bound, c = anti_iso_families(a, b, n)
    pa, qa = _degs(a)
    pb, _ = _degs(b)
    K = 2 * pa + pb + qa + 1
    back = tilde(lhs, bound, a.n)
    return decode_left_family(back, a.n, K), c


def anti_iso_probe_check(
    a: ConformalElement, b: ConformalElement, n: int, probes: Iterable[VNElement], k_max: int
) -> Optional[tuple[int, VNElement, VNElement, VNElement]]:
    """Compare the two operator families directly; first mismatch (k, v, lhs, rhs) or None."""
    lhs, rhs, _, _ = anti_iso_families(a, b, n)
    for v in probes:
        for k in range(k_max + 1):
            l, r = lhs(k, v), rhs(k, v)
            if l != r:
                return k, v, l, r
    return None
