"""n-products on Cend_N = M_N(k[D, x]) and the identities they satisfy.

An element is stored sparsely as ``{(row, col, D-exp, x-exp): coeff}``.  For
monomials a = D^p x^α M and b = D^q x^β K (M, K constant matrices)::

    a (n) b = (-1)^p Σ_j C(q, j) [n]_{p+j} D^{q-j} x^α ∂_x^{n-p-j}(x^β) M·K

where [n]_r = n(n-1)...(n-r+1).  On D-free elements this is A(x)·∂_x^n B(x);
the D-dependence comes from the two sesquilinearity rules

    u (n) Dv = D(u (n) v) + n u (n-1) v,      Du (n) v = -n u (n-1) v.

No λ-bracket (external variable) formalism is used anywhere: everything is
expressed through the family of n-products and the action of D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from gmpy2 import mpq

from .exactpoly import (
    NEG_INF,
    ParseError,
    Poly1,
    Poly2,
    PolyMatrix,
    ShapeError,
    falling,
    parse_poly2,
    rat,
)

Key = tuple[int, int, int, int]


class ConformalElement:
    """An N×N matrix over k[D, x], viewed as an element of Cend_N."""

    __slots__ = ("n", "_t", "_hash", "_by_row", "_mat")

    def __init__(self, n: int, terms: Mapping[Key, object] | None = None):
        if n < 1:
            raise ValueError("matrix size must be positive")
        t: dict[Key, mpq] = {}
        for (i, j, p, q), v in (terms or {}).items():
            if not (0 <= i < n and 0 <= j < n) or p < 0 or q < 0:
                raise ValueError(f"bad term index {(i, j, p, q)} for N={n}")
            v = rat(v)
            if v:
                t[(i, j, p, q)] = t.get((i, j, p, q), 0) + v
        self.n = n
        self._t = {k: v for k, v in t.items() if v}
        self._hash = None
        self._by_row = None
        self._mat = None

    @classmethod
    def _raw(cls, n: int, t: dict[Key, mpq]) -> ConformalElement:
        e = cls.__new__(cls)
        e.n = n
        e._t = t
        e._hash = None
        e._by_row = None
        e._mat = None
        return e

    # constructors
    @classmethod
    def zero(cls, n: int) -> ConformalElement:
        return cls._raw(n, {})

    @classmethod
    def identity(cls, n: int) -> ConformalElement:
        return cls._raw(n, {(i, i, 0, 0): mpq(1) for i in range(n)})

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> ConformalElement:
        """Matrix unit E_ij (0-based indices)."""
        return cls._raw(n, {(i, j, 0, 0): mpq(1)})

    @classmethod
    def scalar(cls, p: Poly2 | int, n: int = 1) -> ConformalElement:
        """p·Id_N."""
        if not isinstance(p, Poly2):
            p = Poly2.const(p)
        return cls._raw(n, {(i, i, a, b): v for i in range(n) for (a, b), v in p.terms().items()})

    @classmethod
    def from_matrix(cls, m: PolyMatrix) -> ConformalElement:
        if not m.is_square():
            raise ShapeError("conformal elements are square matrices")
        t: dict[Key, mpq] = {}
        for i, row in enumerate(m.entries):
            for j, e in enumerate(row):
                if isinstance(e, Poly1):
                    e = Poly2.from_poly1(e)
                for (p, q), v in e.terms().items():
                    t[(i, j, p, q)] = v
        return cls._raw(m.rows, t)

    @classmethod
    def from_entries(cls, n: int, entries: Mapping[tuple[int, int], Poly2]) -> ConformalElement:
        t: dict[Key, mpq] = {}
        for (i, j), e in entries.items():
            for (p, q), v in e.terms().items():
                t[(i, j, p, q)] = v
        return cls(n, t)

    # views
    @property
    def mat(self) -> PolyMatrix:
        if self._mat is None:
            cells: dict[tuple[int, int], dict] = {}
            for (i, j, p, q), v in self._t.items():
                cells.setdefault((i, j), {})[(p, q)] = v
            self._mat = PolyMatrix(
                [[Poly2(cells.get((i, j))) for j in range(self.n)] for i in range(self.n)]
            )
        return self._mat

    def entry(self, i: int, j: int) -> Poly2:
        return self.mat[i, j]

    def terms(self) -> dict[Key, mpq]:
        return dict(self._t)

    def _rows(self) -> dict[int, list[tuple[int, int, int, mpq]]]:
        if self._by_row is None:
            by: dict[int, list] = {}
            for (i, j, p, q), v in self._t.items():
                by.setdefault(i, []).append((j, p, q, v))
            self._by_row = by
        return self._by_row

    @property
    def deg_D(self):
        return max((k[2] for k in self._t), default=NEG_INF)

    @property
    def deg_x(self):
        return max((k[3] for k in self._t), default=NEG_INF)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    # linear structure
    def _check(self, other: ConformalElement) -> None:
        if not isinstance(other, ConformalElement):
            raise TypeError("expected a ConformalElement")
        if other.n != self.n:
            raise ShapeError(f"size mismatch: N={self.n} vs N={other.n}")

    def __add__(self, other: ConformalElement) -> ConformalElement:
        self._check(other)
        t = dict(self._t)
        for k, v in other._t.items():
            s = t.get(k, 0) + v
            if s:
                t[k] = s
            else:
                t.pop(k, None)
        return ConformalElement._raw(self.n, t)

    def __neg__(self) -> ConformalElement:
        return ConformalElement._raw(self.n, {k: -v for k, v in self._t.items()})

    def __sub__(self, other: ConformalElement) -> ConformalElement:
        return self + (-other)

    def __mul__(self, c) -> ConformalElement:
        """Scalar multiple (rational), or left multiplication by a polynomial in D."""
        if isinstance(c, Poly1):
            if c.var != "D":
                raise ValueError("only polynomials in D act on conformal elements")
            acc = ConformalElement.zero(self.n)
            for e, v in c.items():
                acc = acc + self.mul_D(e) * v
            return acc
        c = rat(c)
        if not c:
            return ConformalElement.zero(self.n)
        return ConformalElement._raw(self.n, {k: v * c for k, v in self._t.items()})

    __rmul__ = __mul__

    def mul_D(self, k: int = 1) -> ConformalElement:
        return ConformalElement._raw(self.n, {(i, j, p + k, q): v for (i, j, p, q), v in self._t.items()})

    def matmul(self, other: ConformalElement) -> ConformalElement:
        """Ordinary product in the commutative-entry matrix ring M_N(k[D, x])."""
        self._check(other)
        return ConformalElement.from_matrix(self.mat * other.mat)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConformalElement):
            return NotImplemented
        return self.n == other.n and self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._t.items())))
        return self._hash

    def __str__(self) -> str:
        return format_element(self, sep="; ")

    def __repr__(self) -> str:
        return f"ConformalElement({format_element(self, sep='; ')!r})"


# ---------------------------------------------------------------------------
# text format:  N=<size>; [i,j]: <poly>   (1-based indices, omitted entries zero)


def format_element(e: ConformalElement, sep: str = "\n") -> str:
    parts = [f"N={e.n}"]
    m = e.mat
    for i in range(e.n):
        for j in range(e.n):
            if m[i, j]:
                parts.append(f"[{i + 1},{j + 1}]: {m[i, j]}")
    return sep.join(parts)


def parse_element(text: str, first_line: int = 1) -> ConformalElement:
    """Parse the ``N=<size>; [i,j]: <poly>`` format.

    Items may be separated by newlines or ``;``.  ``#`` starts a comment.
    """
    items: list[tuple[int, int, str]] = []
    for k, raw in enumerate(text.splitlines()):
        line = first_line + k
        body = raw.split("#", 1)[0]
        col = 1
        for chunk in body.split(";"):
            stripped = chunk.strip()
            if stripped:
                lead = len(chunk) - len(chunk.lstrip())
                items.append((line, col + lead, stripped))
            col += len(chunk) + 1
    if not items:
        raise ParseError("empty element", first_line, 1)
    line, col, head = items[0]
    if not head.replace(" ", "").startswith("N="):
        raise ParseError("element must start with N=<size>", line, col)
    size_txt = head.split("=", 1)[1].strip()
    if not size_txt.isdigit() or int(size_txt) < 1:
        raise ParseError(f"bad matrix size {size_txt!r}", line, col)
    n = int(size_txt)
    entries: dict[tuple[int, int], Poly2] = {}
    for line, col, item in items[1:]:
        if not item.startswith("[") or "]" not in item:
            raise ParseError("expected [i,j]: <poly>", line, col)
        idx_txt, rest = item[1:].split("]", 1)
        try:
            i, j = (int(s) for s in idx_txt.split(","))
        except ValueError:
            raise ParseError(f"bad index [{idx_txt}]", line, col) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"index [{i},{j}] out of range for N={n}", line, col)
        rest_stripped = rest.lstrip()
        if not rest_stripped.startswith(":"):
            raise ParseError("expected ':' after index", line, col + len(idx_txt) + 2)
        poly_txt = rest_stripped[1:]
        offset = col + len(item) - len(poly_txt)
        p = parse_poly2(poly_txt, line, offset)
        entries[(i - 1, j - 1)] = entries.get((i - 1, j - 1), Poly2()) + p
    return ConformalElement.from_entries(n, entries)


def parse_elements(text: str) -> list[ConformalElement]:
    """Several elements in one file, separated by lines consisting of ``---``."""
    out: list[ConformalElement] = []
    block: list[str] = []
    start = 1
    for k, raw in enumerate(text.splitlines() + ["---"]):
        if raw.strip() == "---":
            if any(b.split("#", 1)[0].strip() for b in block):
                out.append(parse_element("\n".join(block), start))
            block = []
            start = k + 2
        else:
            block.append(raw)
    return out


# ---------------------------------------------------------------------------
# n-products


def _same_size(a: ConformalElement, b: ConformalElement) -> None:
    if a.n != b.n:
        raise ShapeError(f"size mismatch: N={a.n} vs N={b.n}")


def apriori_bound(a: ConformalElement, b: ConformalElement) -> int:
    """deg_D(a) + deg_D(b) + deg_x(b) + 1; every product at or beyond it vanishes."""
    if not a or not b:
        return 0
    return a.deg_D + b.deg_D + b.deg_x + 1


def n_product(a: ConformalElement, b: ConformalElement, n: int) -> ConformalElement:
    """The n-th product a (n) b."""
    _same_size(a, b)
    if n < 0:
        raise ValueError("n must be non-negative")
    out: dict[Key, mpq] = {}
    brows = b._rows()
    for (i, l, p, al), ca in a._t.items():
        if p > n:
            continue
        sign = -1 if p & 1 else 1
        for k, q, be, cb in brows.get(l, ()):
            c = ca * cb * sign
            for j in range(min(q, n - p) + 1):
                d = n - p - j
                if d > be:
                    continue
                coef = c * (math.comb(q, j) * falling(n, p + j) * falling(be, d))
                key = (i, k, q - j, al + be - d)
                out[key] = out.get(key, 0) + coef
    return ConformalElement._raw(a.n, {k: v for k, v in out.items() if v})


def product_table(a: ConformalElement, b: ConformalElement) -> list[ConformalElement]:
    """[a (0) b, a (1) b, ...] up to the last nonzero product."""
    _same_size(a, b)
    acc: dict[int, dict[Key, mpq]] = {}
    brows = b._rows()
    for (i, l, p, al), ca in a._t.items():
        sign = -1 if p & 1 else 1
        for k, q, be, cb in brows.get(l, ()):
            c = ca * cb * sign
            for j in range(q + 1):
                bj = math.comb(q, j)
                for d in range(be + 1):
                    n = p + j + d
                    coef = c * (bj * falling(n, p + j) * falling(be, d))
                    bucket = acc.setdefault(n, {})
                    key = (i, k, q - j, al + be - d)
                    bucket[key] = bucket.get(key, 0) + coef
    cleaned = {n: {k: v for k, v in t.items() if v} for n, t in acc.items()}
    last = max((n for n, t in cleaned.items() if t), default=-1)
    return [ConformalElement._raw(a.n, cleaned.get(n, {})) for n in range(last + 1)]


def d_action(a: ConformalElement) -> ConformalElement:
    return a.mul_D(1)


def locality_bound(a: ConformalElement, b: ConformalElement) -> int:
    """Least n0 with a (n) b = 0 for every n >= n0."""
    _same_size(a, b)
    n = apriori_bound(a, b)
    while n > 0 and not n_product(a, b, n - 1):
        n -= 1
    return n


def _divided_power_D(e: ConformalElement, s: int) -> ConformalElement:
    """D^(s) e = D^s e / s!"""
    if s == 0:
        return e
    f = mpq(1, math.factorial(s))
    return ConformalElement._raw(e.n, {(i, j, p + s, q): v * f for (i, j, p, q), v in e._t.items()})


def curly_from_table(table: Sequence[ConformalElement], n: int, size: int) -> ConformalElement:
    """{a (n) b} = Σ_s (-1)^(n+s) D^(s) (a (n+s) b), given the full product table."""
    acc: dict[Key, mpq] = {}
    for s in range(max(0, len(table) - n)):
        term = table[n + s]
        if not term:
            continue
        f = mpq((-1) ** (n + s), math.factorial(s))
        for (i, j, p, q), v in term._t.items():
            key = (i, j, p + s, q)
            acc[key] = acc.get(key, 0) + v * f
    return ConformalElement._raw(size, {k: v for k, v in acc.items() if v})


def curly_product(a: ConformalElement, b: ConformalElement, n: int) -> ConformalElement:
    """The right-justified product {a (n) b}."""
    return curly_from_table(product_table(a, b), n, a.n)


def curly_table(a: ConformalElement, b: ConformalElement) -> list[ConformalElement]:
    t = product_table(a, b)
    return [curly_from_table(t, n, a.n) for n in range(len(t))]


def alpha_product(a: ConformalElement, b: ConformalElement, alpha, curly: bool = False) -> ConformalElement:
    """(a_α b) = Σ_n α^(n) (a (n) b), or the curly analogue {a_α b}."""
    alpha = rat(alpha)
    table = curly_table(a, b) if curly else product_table(a, b)
    acc = ConformalElement.zero(a.n)
    for n, t in enumerate(table):
        if t:
            acc = acc + t * (alpha**n / math.factorial(n))
    return acc


# ---------------------------------------------------------------------------
# Fourier transform on H ⊗ H


class TensorHH:
    """Finite sum Σ c_{n,m} D^n ⊗ D^m in H ⊗ H."""

    __slots__ = ("_c",)

    def __init__(self, terms: Iterable[tuple[Poly1, Poly1]] | Mapping[tuple[int, int], object] = ()):
        c: dict[tuple[int, int], mpq] = {}
        if isinstance(terms, Mapping):
            for (n, m), v in terms.items():
                v = rat(v)
                if v:
                    c[(n, m)] = c.get((n, m), 0) + v
        else:
            for f, g in terms:
                for i, u in f.items():
                    for j, v in g.items():
                        c[(i, j)] = c.get((i, j), 0) + u * v
        self._c = {k: v for k, v in c.items() if v}

    @classmethod
    def basis(cls, n: int, m: int) -> TensorHH:
        return cls({(n, m): 1})

    def terms(self) -> dict[tuple[int, int], mpq]:
        return dict(self._c)

    def __add__(self, other: TensorHH) -> TensorHH:
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return TensorHH(c)

    def __sub__(self, other: TensorHH) -> TensorHH:
        return self + TensorHH({k: -v for k, v in other._c.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorHH) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for (n, m), v in sorted(self._c.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
            left = "1" if n == 0 else ("D" if n == 1 else f"D^{n}")
            right = "1" if m == 0 else ("D" if m == 1 else f"D^{m}")
            coef = "" if v == 1 else ("-" if v == -1 else f"{v}*")
            parts.append(f"{coef}{left}⊗{right}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def fourier(t: TensorHH, inverse: bool = False) -> TensorHH:
    """exp(-∂_D ⊗ D) (or exp(∂_D ⊗ D) when ``inverse``), expanded termwise."""
    c: dict[tuple[int, int], mpq] = {}
    sgn = 1 if inverse else -1
    for (n, m), v in t._c.items():
        for s in range(n + 1):
            key = (n - s, m + s)
            c[key] = c.get(key, 0) + v * (sgn**s) * math.comb(n, s)
    return TensorHH(c)


# ---------------------------------------------------------------------------
# identity checkers

IDENTITIES = (
    "C1",
    "C2",
    "C3",
    "conf-ass",
    "conf-ass1",
    "eq2.2.1",
    "eq2.2.2",
    "eq2.2.3",
    "eq2.2.4",
    "anti-iso",
    "commutativity",
)

ARITY = {
    "C1": (2, 1),
    "C2": (2, 1),
    "C3": (2, 1),
    "conf-ass": (3, 2),
    "conf-ass1": (3, 2),
    "eq2.2.1": (3, 2),
    "eq2.2.2": (3, 2),
    "eq2.2.3": (3, 2),
    "eq2.2.4": (3, 2),
    "anti-iso": (2, 1),
    "commutativity": (2, 1),
}


class UnknownIdentity(ValueError):
    pass


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of one identity instance; falsy when they differ."""

    identity: str
    indices: tuple[int, ...]
    lhs: ConformalElement
    rhs: ConformalElement
    elements: tuple[ConformalElement, ...] = field(default=(), compare=False)

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self) -> bool:
        return self.ok

    def report(self) -> str:
        idx = ",".join(str(i) for i in self.indices)
        status = "ok" if self.ok else "MISMATCH"
        return f"{self.identity}[{idx}]: {status}; lhs = {self.lhs}; rhs = {self.rhs}"


class ProductCache:
    """Memoized product and curly tables; identity sweeps reuse these heavily."""

    def __init__(self):
        self._prod: dict[tuple[ConformalElement, ConformalElement], list] = {}
        self._curly: dict[tuple[ConformalElement, ConformalElement], list] = {}

    def table(self, a: ConformalElement, b: ConformalElement) -> list[ConformalElement]:
        key = (a, b)
        t = self._prod.get(key)
        if t is None:
            t = product_table(a, b)
            self._prod[key] = t
        return t

    def prod(self, a: ConformalElement, b: ConformalElement, n: int) -> ConformalElement:
        t = self.table(a, b)
        return t[n] if n < len(t) else ConformalElement.zero(a.n)

    def curly(self, a: ConformalElement, b: ConformalElement, n: int) -> ConformalElement:
        key = (a, b)
        c = self._curly.get(key)
        if c is None:
            t = self.table(a, b)
            c = [curly_from_table(t, k, a.n) for k in range(len(t))]
            self._curly[key] = c
        return c[n] if n < len(c) else ConformalElement.zero(a.n)

    def locality(self, a: ConformalElement, b: ConformalElement) -> int:
        return len(self.table(a, b))


def _sum(terms: Iterable[ConformalElement], n: int) -> ConformalElement:
    acc = ConformalElement.zero(n)
    for t in terms:
        if t:
            acc = acc + t
    return acc


def _sides(tag: str, els: Sequence[ConformalElement], idx: Sequence[int], P: ProductCache):
    N = els[0].n
    prod, curly = P.prod, P.curly
    if tag == "C1":
        u, v = els
        (n,) = idx
        n = max(n, apriori_bound(u, v))
        return prod(u, v, n), ConformalElement.zero(N), (n,)
    if tag == "C2":
        u, v = els
        (n,) = idx
        lhs = prod(u, d_action(v), n)
        rhs = d_action(prod(u, v, n))
        if n:
            rhs = rhs + prod(u, v, n - 1) * n
        return lhs, rhs, None
    if tag == "C3":
        u, v = els
        (n,) = idx
        lhs = prod(d_action(u), v, n)
        rhs = prod(u, v, n - 1) * (-n) if n else ConformalElement.zero(N)
        return lhs, rhs, None
    if tag == "commutativity":
        a, b = els
        (n,) = idx
        return prod(a, b, n), curly(b, a, n), None
    if tag == "anti-iso":
        from .oracles.weyl import anti_iso_sides

        a, b = els
        (n,) = idx
        lhs, rhs = anti_iso_sides(a, b, n)
        return lhs, rhs, None
    u, v, w = els
    n, m = idx
    if tag == "conf-ass":
        lhs = prod(prod(u, v, n), w, m)
        rhs = _sum(
            (prod(u, prod(v, w, m + s), n - s) * ((-1) ** s * math.comb(n, s)) for s in range(n + 1)), N
        )
    elif tag == "conf-ass1":
        lhs = prod(u, prod(v, w, m), n)
        rhs = _sum((prod(prod(u, v, n - s), w, m + s) * math.comb(n, s) for s in range(n + 1)), N)
    elif tag == "eq2.2.1":
        lhs = prod(u, curly(v, w, m), n)
        rhs = curly(prod(u, v, n), w, m)
    elif tag == "eq2.2.2":
        lhs = curly(u, prod(v, w, m), n)
        rhs = _sum(
            (curly(curly(u, v, m - s), w, n + s) * ((-1) ** s * math.comb(m, s)) for s in range(m + 1)), N
        )
    elif tag == "eq2.2.3":
        lhs = curly(u, curly(v, w, m), n)
        rhs = _sum(
            (curly(curly(u, v, n + s), w, m - s) * ((-1) ** s * math.comb(m, s)) for s in range(m + 1)), N
        )
    elif tag == "eq2.2.4":
        lhs = prod(curly(u, v, n), w, m)
        rhs = _sum(
            (prod(u, prod(v, w, n - s), m + s) * ((-1) ** s * math.comb(n, s)) for s in range(n + 1)), N
        )
    else:
        raise UnknownIdentity(tag)
    return lhs, rhs, None


def check_identity(
    tag: str,
    elements: Sequence[ConformalElement],
    indices: Sequence[int],
    cache: Optional[ProductCache] = None,
) -> IdentityCheck:
    """Evaluate both sides of one instance of a named identity.

    Tags: C1, C2, C3, conf-ass, conf-ass1, eq2.2.1 .. eq2.2.4, anti-iso,
    commutativity.  Binary identities take two elements and one index,
    ternary ones three elements and indices (n, m).
    """
    if tag not in ARITY:
        raise UnknownIdentity(f"unknown identity {tag!r}; known: {', '.join(IDENTITIES)}")
    n_el, n_idx = ARITY[tag]
    if len(elements) != n_el or len(indices) != n_idx:
        raise ValueError(f"{tag} takes {n_el} elements and {n_idx} indices")
    for e in elements[1:]:
        _same_size(elements[0], e)
    if any(i < 0 for i in indices):
        raise ValueError("indices must be non-negative")
    lhs, rhs, used = _sides(tag, elements, indices, cache or ProductCache())
    return IdentityCheck(tag, tuple(used or indices), lhs, rhs, tuple(elements))


def sweep_ranges(
    tag: str, elements: Sequence[ConformalElement], cache: ProductCache
) -> list[tuple[int, ...]]:
    """Index tuples covering every product up to the locality bounds (plus one beyond)."""
    if tag not in ARITY:
        raise UnknownIdentity(f"unknown identity {tag!r}")
    if ARITY[tag][0] == 2:
        a, b = elements
        if tag == "C1":
            return [(apriori_bound(a, b) + k,) for k in range(2)]
        top = max(
            cache.locality(a, b),
            cache.locality(b, a),
            cache.locality(a, d_action(b)),
            cache.locality(d_action(a), b),
        )
        return [(n,) for n in range(top + 1)]
    u, v, w = elements
    n_top = max(cache.locality(u, v), cache.locality(v, w), cache.locality(u, w))
    m_top = cache.locality(v, w)
    for n in range(cache.locality(u, v)):
        m_top = max(m_top, cache.locality(cache.prod(u, v, n), w))
        c = cache.curly(u, v, n)
        if c:
            m_top = max(m_top, cache.locality(c, w))
    return [(n, m) for n in range(n_top + 1) for m in range(m_top + 1)]


def sweep_identity(
    tag: str, elements: Sequence[ConformalElement], cache: Optional[ProductCache] = None
) -> Optional[IdentityCheck]:
    """Check every index tuple from :func:`sweep_ranges`; return the first failure or None."""
    cache = cache or ProductCache()
    for idx in sweep_ranges(tag, elements, cache):
        chk = check_identity(tag, elements, idx, cache)
        if not chk.ok:
            return chk
    return None
