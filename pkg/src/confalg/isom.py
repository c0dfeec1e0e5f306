"""Isomorphism test for the algebras Cend_{N,Q}.

Cend_{N,P} and Cend_{N,Q} are isomorphic exactly when the sizes agree and,
for some α in k, P(x) and Q(x + α) share their canonical diagonal form.
Shifting x commutes with taking invariant factors, so the test compares the
two lists of monic factors directly.  In characteristic 0 the shift is
pinned by the subleading coefficient of any nonconstant factor of degree d:
for f = x^d + a x^(d-1) + ... and g = x^d + b x^(d-1) + ..., the identity
f(x) = g(x + α) forces α = (a - b) / d.  That candidate is then checked on
every factor, so the returned α always satisfies f_i(x) = g_i(x + α); it is
rational whenever the inputs are.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .exactpoly import Poly1, PolyMatrix, Rat, ShapeError, mat_det
from .smith import SingularMatrixError, smith_normal_form


class Reason(str, Enum):
    SIZE_MISMATCH = "size-mismatch"
    DEGREE_MISMATCH = "degree-mismatch"
    FACTOR_MISMATCH = "factor-mismatch"
    MATCH = "match"


@dataclass(frozen=True)
class IsoVerdict:
    isomorphic: bool
    alpha: Optional[Rat]
    canonical_p: tuple[Poly1, ...]
    canonical_q: tuple[Poly1, ...]
    reason: Reason = field(default=Reason.MATCH)

    def __bool__(self) -> bool:
        return self.isomorphic


def _check_square_nonsingular(q: PolyMatrix, name: str) -> None:
    if not isinstance(q.like(), Poly1):
        raise ShapeError(f"{name} must have univariate entries")
    if not q.is_square():
        raise ShapeError(f"{name} must be square, got {q.rows}x{q.cols}")
    if not mat_det(q):
        raise SingularMatrixError(f"{name} is singular")


def canonical_form(q: PolyMatrix) -> tuple[Poly1, ...]:
    """Monic invariant factors f_1 | f_2 | ... | f_N of a nonsingular square Q."""
    _check_square_nonsingular(q, "Q")
    factors = smith_normal_form(q).invariant_factors
    if len(factors) != q.rows:
        raise SingularMatrixError("Q is singular")
    return tuple(factors)


def _shift_candidate(f: Poly1, g: Poly1) -> Rat:
    d = int(f.degree)
    return (f.coeff(d - 1) - g.coeff(d - 1)) / d


def iso_test(p: PolyMatrix, q: PolyMatrix) -> IsoVerdict:
    """Decide Cend_{N,P} ≅ Cend_{N,Q}; α satisfies f^P_i(x) = f^Q_i(x + α)."""
    _check_square_nonsingular(p, "P")
    _check_square_nonsingular(q, "Q")
    cp = tuple(f.retag("x") for f in canonical_form(p))
    cq = tuple(f.retag("x") for f in canonical_form(q))
    if p.rows != q.rows:
        return IsoVerdict(False, None, cp, cq, Reason.SIZE_MISMATCH)
    if Counter(int(f.degree) for f in cp) != Counter(int(f.degree) for f in cq):
        return IsoVerdict(False, None, cp, cq, Reason.DEGREE_MISMATCH)
    pair = next(((f, g) for f, g in zip(cp, cq) if f.degree >= 1), None)
    if pair is None:
        return IsoVerdict(True, Rat(0), cp, cq, Reason.MATCH)
    f, g = pair
    if f.degree != g.degree:
        return IsoVerdict(False, None, cp, cq, Reason.FACTOR_MISMATCH)
    alpha = _shift_candidate(f, g)
    if all(fi == gi.shift(alpha) for fi, gi in zip(cp, cq)):
        return IsoVerdict(True, alpha, cp, cq, Reason.MATCH)
    return IsoVerdict(False, None, cp, cq, Reason.FACTOR_MISMATCH)
