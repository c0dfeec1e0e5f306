"""The named algebras Cend_N, Curr_N and Cend_{N,Q} as subsets of M_N(k[D, x]).

Cend_{N,Q} is identified with M_N(k[D, x])·Q(x - D).  Membership is decided
in the variables (D, y = x - D), where it becomes membership in the right
module M_N(k[D][y])·Q(y); the D-coefficients ride along as scalars (the
invariant factors of Q are monic with constant coefficients, so division by
them never introduces denominators in D).

Finite generation of Cend_{N,Q} is known, but no generating set is given in
the literature we follow.  :func:`default_generators` is a working choice
whose spanning behaviour is only checked up to a degree cap in the tests;
callers may always pass their own generators to the growth profiler.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .core import ConformalElement, n_product, product_table
from .exactpoly import ParseError, Poly1, Poly2, PolyMatrix, ShapeError, embed_y_to_x_minus_D, mat_det, parse_polymatrix
from .smith import Membership, SingularMatrixError, right_module_membership


class Kind(str, Enum):
    CEND = "cend"
    CURR = "curr"
    CENDQ = "cendq"


@dataclass(frozen=True)
class AlgebraSpec:
    kind: Kind
    n: int
    q: Optional[PolyMatrix] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("N must be positive")
        if self.kind is Kind.CENDQ:
            if self.q is None:
                raise ValueError("cendq needs a matrix Q")
            if not self.q.is_square() or self.q.rows != self.n:
                raise ShapeError(f"Q must be {self.n}x{self.n}")
            q = self.q.map(lambda p: p.retag("y"))
            object.__setattr__(self, "q", q)
            if not mat_det(q):
                raise SingularMatrixError("Q is singular")
        elif self.q is not None:
            raise ValueError(f"{self.kind.value} takes no matrix")

    def q_embedded(self) -> ConformalElement:
        """Q(x - D) as an element of M_N(k[D, x])."""
        return ConformalElement.from_matrix(embed_y_to_x_minus_D(self.q))

    def __str__(self) -> str:
        if self.kind is Kind.CENDQ:
            rows = "; ".join(", ".join(str(e) for e in r) for r in self.q.entries)
            return f"cendq {self.n} [{rows}]"
        return f"{self.kind.value} {self.n}"


def cend(n: int) -> AlgebraSpec:
    return AlgebraSpec(Kind.CEND, n)


def curr(n: int) -> AlgebraSpec:
    return AlgebraSpec(Kind.CURR, n)


def cendq(q: PolyMatrix) -> AlgebraSpec:
    return AlgebraSpec(Kind.CENDQ, q.rows, q)


def parse_spec(text: str, base_dir: Path | str = ".") -> AlgebraSpec:
    """``cend N`` | ``curr N`` | ``cendq N <matrix-file>``."""
    words = text.split()
    if not words or words[0] not in ("cend", "curr", "cendq"):
        raise ParseError(f"unknown algebra spec {text!r}; expected cend/curr/cendq", 1, 1)
    if len(words) < 2 or not words[1].isdigit() or int(words[1]) < 1:
        raise ParseError("expected a positive size N", 1, len(words[0]) + 2)
    n = int(words[1])
    kind = Kind(words[0])
    if kind is Kind.CENDQ:
        if len(words) != 3:
            raise ParseError("cendq needs a matrix file", 1, 1)
        path = Path(base_dir) / words[2]
        try:
            src = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}", 1, 1) from None
        q = parse_polymatrix(src)
        return AlgebraSpec(kind, n, q)
    if len(words) != 2:
        raise ParseError(f"unexpected trailing text in {text!r}", 1, 1)
    return AlgebraSpec(kind, n)


def membership(spec: AlgebraSpec, e: ConformalElement) -> Membership:
    """Decide e ∈ spec; for Cend_{N,Q} a witness M with e = M·Q(x - D) is returned."""
    if e.n != spec.n:
        raise ShapeError(f"element has N={e.n}, algebra has N={spec.n}")
    if spec.kind is Kind.CEND:
        return Membership(True, witness=e.mat)
    if spec.kind is Kind.CURR:
        ok = not e or e.deg_x <= 0
        return Membership(ok, witness=e.mat if ok else None)
    e_y = e.mat.map(lambda p: p.x_to_y_plus_D())
    res = right_module_membership(e_y, spec.q)
    if not res.member:
        return res
    m = res.witness.map(lambda p: p.y_to_x_minus_D())
    return Membership(True, witness=m)


def is_unit(e: ConformalElement, probes: Sequence[ConformalElement]) -> bool:
    """e (0) p = p for each probe and e (n) e = 0 for n >= 1.

    The probes stand in for "all x in C": pass a generating set.  Left
    0-multiplication is a homomorphism of right modules, so agreement on
    generators is the certificate this function gives.
    """
    for p in probes:
        if p.n != e.n:
            raise ShapeError("probe size mismatch")
        if n_product(e, p, 0) != p:
            return False
    return len(product_table(e, e)) <= 1


def is_idempotent(e: ConformalElement) -> bool:
    """e (n) e = δ_{n,0} e for every n."""
    table = product_table(e, e)
    if not table:
        return not e
    return table[0] == e and len(table) == 1


def default_generators(spec: AlgebraSpec) -> list[ConformalElement]:
    n = spec.n
    units = [ConformalElement.unit(n, i, j) for i in range(n) for j in range(n)]
    if spec.kind is Kind.CURR:
        return units
    if spec.kind is Kind.CEND:
        return units + [ConformalElement.scalar(Poly2.x(), n)]
    q = spec.q_embedded()
    x = ConformalElement.scalar(Poly2.x(), n)
    gens = []
    for k in (0, 1):
        for u in units:
            g = u.matmul(q)
            if k:
                g = x.matmul(g)
            if g and g not in gens:
                gens.append(g)
    return gens
