"""Formal-distribution realization of the current algebra Curr_N.

A symbol (weight, coeff, shift) stands for the series

    Σ_{m ∈ Z} weight(m) · coeff · t^(m + shift) · z^(-m-1)

with values in A = M_N(k[t, t^-1]).  The n-product of two series is the
w^-1 coefficient of a(w) b(z) (w - z)^n, and D acts as d/dz.  Sums of
symbols with different shifts are kept as :class:`Distribution`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from gmpy2 import mpq

from ..core import ConformalElement
from ..exactpoly import Poly1, ShapeError, rat

Matrix = tuple[tuple[mpq, ...], ...]

DEFAULT_WINDOW = 12


def const_matrix(rows: Sequence[Sequence[object]]) -> Matrix:
    return tuple(tuple(rat(v) for v in r) for r in rows)


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(n)), mpq(0)) for j in range(n)) for i in range(n))


def _is_zero(a: Matrix) -> bool:
    return all(not v for r in a for v in r)


@dataclass(frozen=True)
class DistSymbol:
    weight: Poly1
    coeff: Matrix
    shift: int

    def __post_init__(self):
        if self.weight.var != "n":
            raise ValueError("symbol weights are polynomials in n")

    @property
    def size(self) -> int:
        return len(self.coeff)

    def is_zero(self) -> bool:
        return not self.weight or _is_zero(self.coeff)

    def to_distribution(self) -> Distribution:
        return Distribution.from_symbols(self.size, [self])

    def series(self, lo: int, hi: int) -> dict[int, tuple[int, Matrix]]:
        """Modes m in [lo, hi]: m -> (t-exponent, matrix coefficient of z^(-m-1))."""
        out = {}
        for m in range(lo, hi + 1):
            w = self.weight(m)
            if w:
                out[m] = (m + self.shift, tuple(tuple(w * v for v in r) for r in self.coeff))
        return out


class Distribution:
    """Finite sum of symbols, canonicalized as shift -> (i, j) -> weight polynomial."""

    __slots__ = ("n", "_c")

    def __init__(self, n: int, cells: Mapping[int, Mapping[tuple[int, int], Poly1]] | None = None):
        self.n = n
        c: dict[int, dict[tuple[int, int], Poly1]] = {}
        for s, cell in (cells or {}).items():
            kept = {ij: p for ij, p in cell.items() if p}
            if kept:
                c[s] = kept
        self._c = c

    @classmethod
    def from_symbols(cls, n: int, symbols: Sequence[DistSymbol]) -> Distribution:
        acc: dict[int, dict[tuple[int, int], Poly1]] = {}
        for sym in symbols:
            if sym.size != n:
                raise ShapeError("symbol size mismatch")
            cell = acc.setdefault(sym.shift, {})
            for i in range(n):
                for j in range(n):
                    v = sym.coeff[i][j]
                    if v:
                        cell[(i, j)] = cell.get((i, j), Poly1({}, "n")) + sym.weight * v
        return cls(n, acc)

    def symbols(self) -> list[DistSymbol]:
        """Expand into single-entry symbols (weight, E_ij, shift)."""
        out = []
        for s in sorted(self._c):
            for (i, j), p in sorted(self._c[s].items()):
                e = tuple(tuple(mpq(1) if (a, b) == (i, j) else mpq(0) for b in range(self.n)) for a in range(self.n))
                out.append(DistSymbol(p, e, s))
        return out

    def as_symbol(self) -> Optional[DistSymbol]:
        """The single symbol this equals, if it is one (weight normalized to a common polynomial)."""
        if len(self._c) != 1:
            return None if self._c else DistSymbol(Poly1({}, "n"), tuple((mpq(0),) * self.n for _ in range(self.n)), 0)
        (s, cell), = self._c.items()
        ref = next(iter(cell.values()))
        coeff = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                p = cell.get((i, j))
                if p is None:
                    row.append(mpq(0))
                    continue
                q, r = p.divmod(ref)
                if r or not q.is_constant():
                    return None
                row.append(q.coeff(0))
            coeff.append(tuple(row))
        return DistSymbol(ref, tuple(coeff), s)

    def __add__(self, other: Distribution) -> Distribution:
        c = {s: dict(cell) for s, cell in self._c.items()}
        for s, cell in other._c.items():
            tgt = c.setdefault(s, {})
            for ij, p in cell.items():
                tgt[ij] = tgt[ij] + p if ij in tgt else p
        return Distribution(self.n, c)

    def scale(self, v) -> Distribution:
        return Distribution(self.n, {s: {ij: p * v for ij, p in cell.items()} for s, cell in self._c.items()})

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other) -> bool:
        return isinstance(other, Distribution) and self.n == other.n and self._c == other._c

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for s in sorted(self._c):
            for (i, j), p in sorted(self._c[s].items()):
                parts.append(f"({p})·E{i + 1}{j + 1}·t^(n{s:+d})")
        return " + ".join(parts)

    __repr__ = __str__


def dist_d_action(a: Distribution) -> Distribution:
    """d/dz on symbols: (p(n), s) -> (-n p(n-1), s-1)."""
    n_poly = Poly1.gen("n")
    return Distribution(
        a.n, {s - 1: {ij: -(n_poly * p.shift(-1)) for ij, p in cell.items()} for s, cell in a._c.items()}
    )


def symbol_d_action(a: DistSymbol) -> DistSymbol:
    return DistSymbol(-(Poly1.gen("n") * a.weight.shift(-1)), a.coeff, a.shift - 1)


def _weight_product(wa: Poly1, wb: Poly1, m: int) -> Poly1:
    """j -> Σ_i (-1)^(m-i) C(m, i) wa(i) wb(j + m - i)."""
    acc = Poly1({}, "n")
    for i in range(m + 1):
        c = wa(i)
        if c:
            acc = acc + wb.shift(m - i) * (c * ((-1) ** (m - i) * math.comb(m, i)))
    return acc


def residue_n_product(a: DistSymbol, b: DistSymbol, m: int) -> DistSymbol:
    """Res_w a(w) b(z) (w - z)^m in closed form."""
    if a.size != b.size:
        raise ShapeError("coefficient size mismatch")
    return DistSymbol(_weight_product(a.weight, b.weight, m), _matmul(a.coeff, b.coeff), a.shift + b.shift + m)


def residue_product(a: Distribution, b: Distribution, m: int) -> Distribution:
    """Bilinear extension of :func:`residue_n_product` to sums of symbols."""
    if a.n != b.n:
        raise ShapeError("size mismatch")
    n = a.n
    acc: dict[int, dict[tuple[int, int], Poly1]] = {}
    for sa, ca in a._c.items():
        for sb, cb in b._c.items():
            tgt = acc.setdefault(sa + sb + m, {})
            for (i, l), pa in ca.items():
                for (l2, k), pb in cb.items():
                    if l != l2:
                        continue
                    w = _weight_product(pa, pb, m)
                    tgt[(i, k)] = tgt[(i, k)] + w if (i, k) in tgt else w
    return Distribution(n, acc)


def residue_locality_bound(a: DistSymbol, b: DistSymbol) -> int:
    if a.is_zero() or b.is_zero():
        return 0
    return int(a.weight.degree) + int(b.weight.degree) + 1


# ---------------------------------------------------------------------------
# brute force over a window of modes


def brute_force_residue(a: DistSymbol, b: DistSymbol, m: int, window: int = DEFAULT_WINDOW):
    """Expand a(w) b(z) (w - z)^m over modes in [-window, window] and read off w^-1.

    Returns {z-exponent: {t-exponent: matrix}} for the z-exponents whose
    coefficient is complete inside the window.
    """
    degs = [int(a.weight.degree) if a.weight else 0, int(b.weight.degree) if b.weight else 0]
    if window <= m or window <= max(degs):
        raise ValueError(f"window {window} must exceed m={m} and the weight degrees {degs}")
    n = a.size
    A = a.series(-window, window)
    B = b.series(-window, window)
    full: dict[tuple[int, int, int], Matrix] = {}
    for r, (ta, ma) in A.items():
        for j, (tb, mb) in B.items():
            ab = _matmul(ma, mb)
            for k in range(m + 1):
                c = math.comb(m, k) * (-1) ** (m - k)
                key = (-r - 1 + k, -j - 1 + m - k, ta + tb)
                prev = full.get(key)
                scaled = tuple(tuple(v * c for v in row) for row in ab)
                full[key] = scaled if prev is None else tuple(
                    tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(prev, scaled)
                )
    out: dict[int, dict[int, Matrix]] = {}
    lo, hi = -window, window - m
    for (we, ze, te), mat in full.items():
        if we != -1 or _is_zero(mat):
            continue
        J = -ze - 1
        if lo <= J <= hi:
            out.setdefault(ze, {})[te] = mat
    return out, (lo, hi)


def symbol_window(sym: DistSymbol, lo: int, hi: int) -> dict[int, dict[int, Matrix]]:
    out: dict[int, dict[int, Matrix]] = {}
    for J, (te, mat) in sym.series(lo, hi).items():
        if not _is_zero(mat):
            out.setdefault(-J - 1, {})[te] = mat
    return out


def residue_matches_brute_force(a: DistSymbol, b: DistSymbol, m: int, window: int = DEFAULT_WINDOW) -> bool:
    brute, (lo, hi) = brute_force_residue(a, b, m, window)
    return brute == symbol_window(residue_n_product(a, b, m), lo, hi)


# ---------------------------------------------------------------------------
# embedding of Curr_N


def curr_embed(f: Poly1, coeff: Matrix) -> Distribution:
    """f(D)·A realized as f(d/dz) applied to the symbol (1, A, 0)."""
    if f.var != "D":
        raise ValueError("f must be a polynomial in D")
    n = len(coeff)
    base = DistSymbol(Poly1.const(1, "n"), coeff, 0).to_distribution()
    acc = Distribution(n)
    power = base
    for e in range(int(f.degree) + 1 if f else 0):
        c = f.coeff(e)
        if c:
            acc = acc + power.scale(c)
        power = dist_d_action(power)
    return acc


def embed_current(e: ConformalElement) -> Distribution:
    """Embed an element of Curr_N (x-degree 0) as a distribution."""
    if e and e.deg_x > 0:
        raise ValueError("only x-free elements lie in the current algebra")
    n = e.n
    acc = Distribution(n)
    for (i, j, p, _q), v in e.terms().items():
        unit = tuple(tuple(mpq(1) if (a, b) == (i, j) else mpq(0) for b in range(n)) for a in range(n))
        acc = acc + curr_embed(Poly1.monomial(p, v, "D"), unit)
    return acc
