"""Growth of the filtration C_1 ⊂ C_2 ⊂ ... and its H-ranks d_n.

C_n is the H-span of conformal monomials of length <= n in the generators.
By the associativity rule u (n) (v (m) w) = Σ_s C(n, s) (u (n-s) v) (m+s) w
every bracketing is an H-combination of left-normed words, so only those
are enumerated.

The verdict is a finite-window reading of the sequence, never a statement
about the limsup: "finite" once two consecutive ranks agree (for a
torsion-free module the ranks are then constant), "linear" when the tail of
increments is a positive constant, otherwise "superlinear-or-unknown".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import ConformalElement, ProductCache
from .exactpoly import Poly1

DEFAULT_SPAN_CAP = 20000


class SpanCapExceeded(RuntimeError):
    def __init__(self, message: str, partial: Optional[list[int]] = None):
        super().__init__(message)
        self.partial = partial or []


def _normalize(e: ConformalElement) -> ConformalElement:
    """Scale so that the largest term key has coefficient 1 (H-span is unchanged)."""
    t = e.terms()
    lead = t[max(t)]
    return e if lead == 1 else e * (1 / lead)


def _check_gens(generators: Sequence[ConformalElement]) -> None:
    if not generators:
        raise ValueError("empty generator list")
    n = generators[0].n
    if any(g.n != n for g in generators):
        raise ValueError("generators have different sizes")


def span_levels(
    generators: Sequence[ConformalElement],
    n: int,
    cap: int = DEFAULT_SPAN_CAP,
    cache: Optional[ProductCache] = None,
) -> list[list[ConformalElement]]:
    """New left-normed monomials of each length 1..n (zero products and repeats pruned)."""
    _check_gens(generators)
    cache = cache or ProductCache()
    seen: set[ConformalElement] = set()
    levels: list[list[ConformalElement]] = []
    first = []
    for g in generators:
        if g:
            g = _normalize(g)
            if g not in seen:
                seen.add(g)
                first.append(g)
    levels.append(first)
    frontier = first
    total = len(first)
    for _ in range(1, n):
        nxt: list[ConformalElement] = []
        for u in frontier:
            for g in generators:
                for prod in cache.table(u, g):
                    if not prod:
                        continue
                    prod = _normalize(prod)
                    if prod in seen:
                        continue
                    seen.add(prod)
                    nxt.append(prod)
                    total += 1
                    if total > cap:
                        raise SpanCapExceeded(f"span exceeds {cap} monomials at length {len(levels) + 1}")
        levels.append(nxt)
        frontier = nxt
    return levels


def span_Cn(generators: Sequence[ConformalElement], n: int, cap: int = DEFAULT_SPAN_CAP) -> list[ConformalElement]:
    """An H-spanning set of C_n: the distinct nonzero left-normed monomials of length <= n."""
    return [e for level in span_levels(generators, n, cap) for e in level]


def span_all_bracketings(generators: Sequence[ConformalElement], n: int) -> list[ConformalElement]:
    """Every nonzero monomial of length <= n under every bracketing (slow; for checking)."""
    _check_gens(generators)
    cache = ProductCache()
    by_len: dict[int, set[ConformalElement]] = {1: {g for g in generators if g}}
    for length in range(2, n + 1):
        out: set[ConformalElement] = set()
        for left in range(1, length):
            for u in by_len[left]:
                for v in by_len[length - left]:
                    out.update(p for p in cache.table(u, v) if p)
        by_len[length] = out
    return sorted({e for s in by_len.values() for e in s}, key=lambda e: sorted(e.terms().items()))


def coordinates(elements: Sequence[ConformalElement]) -> tuple[list[tuple[int, int, int]], list[list[Poly1]]]:
    """Coordinates over H in the basis x^q E_ij: one row per element, entries in k[D]."""
    cols: set[tuple[int, int, int]] = set()
    for e in elements:
        cols.update((i, j, q) for (i, j, _p, q) in e.terms())
    keys = sorted(cols)
    index = {k: c for c, k in enumerate(keys)}
    rows = []
    for e in elements:
        row: list[dict[int, object]] = [dict() for _ in keys]
        for (i, j, p, q), v in e.terms().items():
            row[index[(i, j, q)]][p] = v
        rows.append([Poly1(c, "D") for c in row])
    return keys, rows


def bareiss_rank(rows: Sequence[Sequence[Poly1]]) -> int:
    """Rank over k(D) by fraction-free (Bareiss) elimination over k[D].

    Pivot: minimal degree in the remaining block, ties broken by lowest
    (row, column).  Each update is an exact division by the previous pivot.
    """
    M = [list(r) for r in rows if any(r)]
    if not M:
        return 0
    nr, nc = len(M), len(M[0])
    prev = Poly1.const(1, "D")
    rank = 0
    for k in range(min(nr, nc)):
        best = None
        for i in range(k, nr):
            row = M[i]
            for j in range(k, nc):
                e = row[j]
                if e:
                    key = (e.degree, i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, pi, pj = best
        M[k], M[pi] = M[pi], M[k]
        if pj != k:
            for row in M:
                row[k], row[pj] = row[pj], row[k]
        piv = M[k][k]
        for i in range(k + 1, nr):
            row = M[i]
            f = row[k]
            for j in range(k + 1, nc):
                val = row[j] * piv
                if f and M[k][j]:
                    val = val - f * M[k][j]
                if val and prev != 1:
                    q, r = val.divmod(prev)
                    if r:
                        raise ArithmeticError("Bareiss division was not exact")
                    val = q
                row[j] = val
            row[k] = piv.zero()
        prev = piv
        rank += 1
    return rank


def rank_over_H(elements: Sequence[ConformalElement]) -> int:
    """Rank of the H-submodule generated by ``elements``."""
    if not elements:
        return 0
    _, rows = coordinates(elements)
    return bareiss_rank(rows)


@dataclass(frozen=True)
class GrowthProfile:
    generators: tuple[ConformalElement, ...]
    d: tuple[int, ...]
    verdict: str
    log_estimate: Fraction
    window: int = field(default=0)

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.d, self.d[1:]))

    def table(self) -> list[tuple[int, int, int]]:
        """Rows (n, d_n, d_n - d_{n-1}); the first delta is d_1."""
        out = []
        prev = 0
        for n, dn in enumerate(self.d, start=1):
            out.append((n, dn, dn - prev))
            prev = dn
        return out


def classify(d: Sequence[int]) -> str:
    if any(a == b for a, b in zip(d, d[1:])):
        return "finite"
    deltas = [b - a for a, b in zip(d, d[1:])]
    tail = deltas[-max(2, (len(deltas) + 1) // 2):]
    if len(deltas) >= 2 and tail[0] > 0 and all(t == tail[0] for t in tail):
        return "linear"
    return "superlinear-or-unknown"


def log_estimate(d: Sequence[int]) -> Fraction:
    n = len(d)
    if n < 2 or d[-1] <= 0:
        return Fraction(0)
    return Fraction(math.log(d[-1]) / math.log(n)).limit_denominator(1000)


def gk_profile(
    generators: Sequence[ConformalElement], n_max: int, cap: int = DEFAULT_SPAN_CAP
) -> GrowthProfile:
    """d_n = rank C_n for n = 1..n_max with a window-limited growth verdict.

    Raises :class:`SpanCapExceeded` (carrying the ranks computed so far) if
    the monomial enumeration passes ``cap``.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    _check_gens(generators)
    cache = ProductCache()
    d: list[int] = []
    seen: set[ConformalElement] = set()
    span: list[ConformalElement] = []
    frontier: list[ConformalElement] = []
    for g in generators:
        if g:
            g = _normalize(g)
            if g not in seen:
                seen.add(g)
                frontier.append(g)
    span.extend(frontier)
    d.append(rank_over_H(span))
    for _ in range(2, n_max + 1):
        nxt = []
        for u in frontier:
            for g in generators:
                for prod in cache.table(u, g):
                    if prod:
                        prod = _normalize(prod)
                        if prod not in seen:
                            seen.add(prod)
                            nxt.append(prod)
                            if len(seen) > cap:
                                raise SpanCapExceeded(f"span exceeds {cap} monomials at length {len(d) + 1}", d)
        span.extend(nxt)
        frontier = nxt
        d.append(rank_over_H(span))
    return GrowthProfile(tuple(generators), tuple(d), classify(d), log_estimate(d), n_max)
