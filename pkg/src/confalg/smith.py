"""Smith normal form over k[t] and right-module membership in M_N(k[t])·Q.

Coefficient swell is the known hazard of naive elimination over k[t]: the
intermediate degrees can grow well past the input degrees.  Every step checks
the degrees of the working matrix against ``degree_cap`` and raises
:class:`SNFDegreeError` instead of running away.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .exactpoly import Poly1, Poly2, PolyMatrix, ShapeError, mat_det

DEFAULT_DEGREE_CAP = 256


class SNFDegreeError(RuntimeError):
    pass


class SingularMatrixError(ValueError):
    pass


@dataclass(frozen=True)
class SNFResult:
    U: PolyMatrix
    S: PolyMatrix
    V: PolyMatrix
    invariant_factors: tuple[Poly1, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


class _Work:
    """Mutable working copy of S with U, V tracked so that U·A·V = S."""

    def __init__(self, a: PolyMatrix, cap: int):
        self.m, self.n = a.shape
        self.like = a.like()
        z, o = self.like.zero(), self.like.one()
        self.S = [list(r) for r in a.entries]
        self.U = [[o if i == j else z for j in range(self.m)] for i in range(self.m)]
        self.V = [[o if i == j else z for j in range(self.n)] for i in range(self.n)]
        self.cap = cap

    def _guard(self, *rows_or_cols):
        for line in rows_or_cols:
            for e in line:
                if e and e.degree > self.cap:
                    raise SNFDegreeError(
                        f"intermediate degree {e.degree} exceeds cap {self.cap}"
                    )

    def swap_rows(self, i, j):
        if i != j:
            self.S[i], self.S[j] = self.S[j], self.S[i]
            self.U[i], self.U[j] = self.U[j], self.U[i]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.S:
                row[i], row[j] = row[j], row[i]
            for row in self.V:
                row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, q):
        """row_dst += q * row_src"""
        for M in (self.S, self.U):
            M[dst] = [a + q * b if b else a for a, b in zip(M[dst], M[src])]
        self._guard(self.S[dst])

    def add_col(self, dst, src, q):
        for M in (self.S, self.V):
            for row in M:
                if row[src]:
                    row[dst] = row[dst] + q * row[src]
        self._guard([row[dst] for row in self.S])

    def scale_row(self, i, c):
        for M in (self.S, self.U):
            M[i] = [e * c for e in M[i]]

    def combine_rows(self, i, j, a, b, c, d):
        """(row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j)"""
        for M in (self.S, self.U):
            ri, rj = M[i], M[j]
            M[i] = [a * x + b * y for x, y in zip(ri, rj)]
            M[j] = [c * x + d * y for x, y in zip(ri, rj)]
        self._guard(self.S[i], self.S[j])

    def combine_cols(self, i, j, a, b, c, d):
        """(col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)"""
        for M in (self.S, self.V):
            for row in M:
                x, y = row[i], row[j]
                row[i] = a * x + b * y
                row[j] = c * x + d * y
        self._guard([row[i] for row in self.S], [row[j] for row in self.S])


def _pick_pivot(w: _Work, k: int) -> Optional[tuple[int, int]]:
    best = None
    for i in range(k, w.m):
        for j in range(k, w.n):
            e = w.S[i][j]
            if e:
                key = (e.degree, i, j)
                if best is None or key < best:
                    best = key
    return None if best is None else (best[1], best[2])


def smith_normal_form(a: PolyMatrix, degree_cap: int = DEFAULT_DEGREE_CAP) -> SNFResult:
    """Smith normal form U·A·V = S over k[t] with monic invariant factors.

    Pivots are chosen by minimal degree, ties broken by lowest (row, col).
    After diagonalization, pairs of diagonal entries violating the
    divisibility chain are replaced by (gcd, lcm) until a fixpoint.
    """
    if not isinstance(a.like(), Poly1):
        raise TypeError("smith_normal_form expects a matrix over a univariate ring")
    w = _Work(a, degree_cap)
    r = 0
    for k in range(min(w.m, w.n)):
        piv = _pick_pivot(w, k)
        if piv is None:
            break
        while True:
            i, j = piv
            w.swap_rows(k, i)
            w.swap_cols(k, j)
            p = w.S[k][k]
            dirty = False
            for i in range(k + 1, w.m):
                e = w.S[i][k]
                if e:
                    q, rem = e.divmod(p)
                    w.add_row(i, k, -q)
                    dirty = dirty or bool(rem)
            for j in range(k + 1, w.n):
                e = w.S[k][j]
                if e:
                    q, rem = e.divmod(p)
                    w.add_col(j, k, -q)
                    dirty = dirty or bool(rem)
            if not dirty:
                break
            # a remainder of smaller degree now sits in row/column k
            best = None
            for i in range(k, w.m):
                e = w.S[i][k]
                if e and (best is None or (e.degree, i, k) < best):
                    best = (e.degree, i, k)
            for j in range(k, w.n):
                e = w.S[k][j]
                if e and (best is None or (e.degree, k, j) < best):
                    best = (e.degree, k, j)
            piv = (best[1], best[2])
        r = k + 1
    _repair_chain(w, r)
    for k in range(r):
        lc = w.S[k][k].lc()
        if lc != 1:
            w.scale_row(k, 1 / lc)
    U, S, V = PolyMatrix(w.U), PolyMatrix(w.S), PolyMatrix(w.V)
    return SNFResult(U, S, V, tuple(w.S[k][k] for k in range(r)))


def _repair_chain(w: _Work, r: int) -> None:
    changed = True
    while changed:
        changed = False
        for i in range(r):
            for j in range(i + 1, r):
                a, b = w.S[i][i], w.S[j][j]
                if a.divides(b):
                    continue
                g, s, t = a.xgcd(b)
                ag, bg = a // g, b // g
                # [[s, t], [-b/g, a/g]] diag(a, b) [[1, -t b/g], [1, s a/g]] = diag(g, a b/g)
                w.combine_rows(i, j, s, t, -bg, ag)
                w.combine_cols(i, j, w.like.one(), w.like.one(), -t * bg, s * ag)
                changed = True


def invariant_factors(a: PolyMatrix) -> tuple[Poly1, ...]:
    return smith_normal_form(a).invariant_factors


def is_smith_form(res: SNFResult, a: PolyMatrix) -> bool:
    """Check every contract of an SNFResult against its input."""
    if res.U * a * res.V != res.S:
        return False
    if not (is_unimodular(res.U) and is_unimodular(res.V)):
        return False
    S = res.S
    r = len(res.invariant_factors)
    for i in range(S.rows):
        for j in range(S.cols):
            if i != j and S[i, j]:
                return False
    for k in range(min(S.rows, S.cols)):
        e = S[k, k]
        if k < r:
            if e != res.invariant_factors[k] or not e or e.lc() != 1:
                return False
        elif e:
            return False
    return all(res.invariant_factors[k].divides(res.invariant_factors[k + 1]) for k in range(r - 1))


def is_unimodular(a: PolyMatrix) -> bool:
    if not a.is_square():
        raise ShapeError("unimodularity needs a square matrix")
    d = mat_det(a)
    return bool(d) and d.is_constant()


@dataclass(frozen=True)
class Membership:
    """Outcome of a right-module membership test.

    On success ``witness`` is M with M·Q = E.  On failure ``column`` and
    ``row`` locate an entry of E·V that the invariant factor of that column
    does not divide, which refutes membership.
    """

    member: bool
    witness: Optional[PolyMatrix] = None
    column: Optional[int] = None
    row: Optional[int] = None

    def __bool__(self) -> bool:
        return self.member


def right_module_membership(e: PolyMatrix, q: PolyMatrix) -> Membership:
    """Decide whether E = M·Q for a polynomial matrix M.

    With U·Q·V = S = diag(s_j), E = M·Q iff every column j of E·V is divisible
    by s_j; then M = (E·V·S^-1)·U.  E may have Poly1 entries (same variable
    as Q) or Poly2 entries whose second slot is Q's variable; in the latter
    case the first slot acts as scalars, and since every s_j is monic with
    constant coefficients the division stays polynomial.
    """
    if not q.is_square() or e.shape != q.shape:
        raise ShapeError("E and Q must be square of equal size")
    snf = smith_normal_form(q)
    n = q.rows
    if len(snf.invariant_factors) < n:
        raise SingularMatrixError("Q is singular")
    bivariate = isinstance(e.like(), Poly2)
    if bivariate:
        V = snf.V.map(lambda p: Poly2.from_poly1(p.retag("x")))
        U = snf.U.map(lambda p: Poly2.from_poly1(p.retag("x")))
    else:
        V, U = snf.V, snf.U
    ev = e * V
    cols = []
    for j in range(n):
        s = snf.invariant_factors[j]
        col = []
        for i in range(n):
            entry = ev[i, j]
            if bivariate:
                quo, rem = entry.divmod_second(s.retag("x"))
            else:
                quo, rem = entry.divmod(s)
            if rem:
                return Membership(False, column=j, row=i)
            col.append(quo)
        cols.append(col)
    m_prime = PolyMatrix([[cols[j][i] for j in range(n)] for i in range(n)])
    return Membership(True, witness=m_prime * U)
