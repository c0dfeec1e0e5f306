"""Exact rationals, sparse univariate/bivariate polynomials and small matrices.

Coefficients are :class:`gmpy2.mpq` values.  Every polynomial is stored as an
exponent -> coefficient map with zero coefficients stripped at construction,
so structural equality is mathematical equality.

Bivariate polynomials live in k[D, x]; the two slots are always named
``D`` (first) and ``x`` (second).  A couple of helpers reuse the second slot
for the variable ``y = x - D`` (see :meth:`Poly2.x_to_y_plus_D`).

Textual grammar (used by every file format in the package)::

    3/2*D^2*x - x + 1

terms ``c * D^p * x^q`` joined by ``+``/``-``; ``c`` an integer or ``a/b``;
unit coefficients and unit exponents may be omitted; whitespace is ignored.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from gmpy2 import mpq

Rat = mpq
NEG_INF = float("-inf")

VAR_TAGS = ("D", "x", "y", "n", "t")

Number = Union[int, "mpq"]


def rat(value) -> mpq:
    """Coerce ints, ``mpq``, ``Fraction`` or ``"a/b"`` strings to an exact rational."""
    if isinstance(value, str):
        return mpq(value.strip())
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return mpq(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass an int, mpq or 'a/b' string")
    return mpq(value)


def falling(n: int, k: int) -> int:
    """n(n-1)...(n-k+1); zero when k > n (n >= 0)."""
    if k < 0:
        return 0
    if k > n:
        return 0
    return math.perm(n, k)


def format_rat(c: mpq) -> str:
    return str(c)


class VariableMismatch(ValueError):
    pass


class ShapeError(ValueError):
    pass


class ParseError(ValueError):
    """Raised on malformed textual input; carries 1-based line and column."""

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.msg = message
        self.line = line
        self.col = col


def _is_scalar(v) -> bool:
    return isinstance(v, (int, type(mpq(0)))) or (
        hasattr(v, "numerator") and not isinstance(v, (Poly1, Poly2))
    )


# ---------------------------------------------------------------------------
# univariate


class Poly1:
    """Univariate polynomial with rational coefficients in one tagged variable."""

    __slots__ = ("var", "_c", "_hash")

    def __init__(self, coeffs: Mapping[int, Number] | Sequence[Number] | None = None, var: str = "x"):
        if var not in VAR_TAGS:
            raise ValueError(f"unknown variable tag {var!r}")
        self.var = var
        c: dict[int, mpq] = {}
        if coeffs is None:
            pass
        elif isinstance(coeffs, Mapping):
            for e, v in coeffs.items():
                if e < 0:
                    raise ValueError("negative exponent")
                v = rat(v)
                if v:
                    c[int(e)] = v
        else:
            for e, v in enumerate(coeffs):
                v = rat(v)
                if v:
                    c[e] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict[int, mpq], var: str) -> Poly1:
        p = cls.__new__(cls)
        p.var = var
        p._c = c
        p._hash = None
        return p

    # constructors
    @classmethod
    def const(cls, value: Number, var: str = "x") -> Poly1:
        return cls({0: value}, var)

    @classmethod
    def gen(cls, var: str = "x") -> Poly1:
        return cls({1: 1}, var)

    @classmethod
    def monomial(cls, exp: int, coeff: Number = 1, var: str = "x") -> Poly1:
        return cls({exp: coeff}, var)

    def zero(self) -> Poly1:
        return Poly1._raw({}, self.var)

    def one(self) -> Poly1:
        return Poly1._raw({0: mpq(1)}, self.var)

    # inspection
    @property
    def degree(self):
        return max(self._c) if self._c else NEG_INF

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return not self._c or (len(self._c) == 1 and 0 in self._c)

    def coeff(self, e: int) -> mpq:
        return self._c.get(e, mpq(0))

    def lc(self) -> mpq:
        return self._c[max(self._c)] if self._c else mpq(0)

    def items(self) -> list[tuple[int, mpq]]:
        return sorted(self._c.items())

    def terms(self) -> dict[int, mpq]:
        return dict(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def retag(self, var: str) -> Poly1:
        return Poly1._raw(dict(self._c), var)

    # arithmetic
    def _coerce(self, other) -> Poly1:
        if isinstance(other, Poly1):
            if other.var != self.var:
                raise VariableMismatch(f"variables {self.var!r} and {other.var!r} differ")
            return other
        if _is_scalar(other):
            return Poly1.const(other, self.var)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c = dict(self._c)
        for e, v in o._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return Poly1._raw(c, self.var)

    __radd__ = __add__

    def __neg__(self) -> Poly1:
        return Poly1._raw({e: -v for e, v in self._c.items()}, self.var)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if _is_scalar(other) and not isinstance(other, Poly1):
            s = rat(other)
            if not s:
                return self.zero()
            return Poly1._raw({e: v * s for e, v in self._c.items()}, self.var)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c: dict[int, mpq] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in o._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return Poly1._raw({e: v for e, v in c.items() if v}, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly1:
        if k < 0:
            raise ValueError("negative power")
        result, base = self.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly1):
            return self.var == other.var and self._c == other._c
        if _is_scalar(other):
            v = rat(other)
            return self._c == ({0: v} if v else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Poly1", self.var, frozenset(self._c.items())))
        return self._hash

    # calculus and substitution
    def derivative(self, order: int = 1) -> Poly1:
        return Poly1._raw(
            {e - order: v * falling(e, order) for e, v in self._c.items() if e >= order}, self.var
        )

    def __call__(self, value):
        """Evaluate at a scalar, or compose with a polynomial (Horner)."""
        if not self._c:
            return value * 0 if isinstance(value, (Poly1, Poly2)) else mpq(0)
        deg = max(self._c)
        acc = self._c[deg] + value * 0 if isinstance(value, (Poly1, Poly2)) else self._c[deg]
        for e in range(deg - 1, -1, -1):
            acc = acc * value + self._c.get(e, 0)
        return acc

    def shift(self, alpha: Number) -> Poly1:
        """Return p(t + alpha), expanded."""
        alpha = rat(alpha)
        if not alpha:
            return self
        c: dict[int, mpq] = {}
        for e, v in self._c.items():
            for k in range(e + 1):
                term = v * math.comb(e, k) * alpha ** (e - k)
                c[k] = c.get(k, 0) + term
        return Poly1._raw({e: v for e, v in c.items() if v}, self.var)

    # Euclidean structure
    def divmod(self, other: Poly1) -> tuple[Poly1, Poly1]:
        other = self._coerce(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        q: dict[int, mpq] = {}
        r = dict(self._c)
        dg = max(other._c)
        lc = other._c[dg]
        while r:
            e = max(r)
            if e < dg:
                break
            f = r[e] / lc
            q[e - dg] = f
            for e2, v2 in other._c.items():
                k = e - dg + e2
                s = r.get(k, 0) - f * v2
                if s:
                    r[k] = s
                else:
                    r.pop(k, None)
        return Poly1._raw(q, self.var), Poly1._raw(r, self.var)

    def __floordiv__(self, other) -> Poly1:
        return self.divmod(other)[0]

    def __mod__(self, other) -> Poly1:
        return self.divmod(other)[1]

    def divides(self, other: Poly1) -> bool:
        if not self:
            return not other
        return not other.divmod(self)[1]

    def monic(self) -> Poly1:
        return self * (1 / self.lc()) if self._c else self

    def xgcd(self, other: Poly1) -> tuple[Poly1, Poly1, Poly1]:
        """Return (g, s, t) with s*self + t*other = g, g monic (or zero)."""
        r0, r1 = self, self._coerce(other)
        s0, s1 = self.one(), self.zero()
        t0, t1 = self.zero(), self.one()
        while r1:
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0:
            inv = 1 / r0.lc()
            r0, s0, t0 = r0 * inv, s0 * inv, t0 * inv
        return r0, s0, t0

    def gcd(self, other: Poly1) -> Poly1:
        return self.xgcd(other)[0]

    def __str__(self) -> str:
        return _format_terms(
            ((e, v) for e, v in sorted(self._c.items(), reverse=True)),
            lambda e: _mono(self.var, e),
        )

    def __repr__(self) -> str:
        return f"Poly1({str(self)!r}, var={self.var!r})"


# ---------------------------------------------------------------------------
# bivariate k[D, x]


class Poly2:
    """Polynomial in the commuting variables D and x; keys are (D-exp, x-exp)."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping[tuple[int, int], Number] | None = None):
        c: dict[tuple[int, int], mpq] = {}
        if coeffs:
            for (i, j), v in coeffs.items():
                if i < 0 or j < 0:
                    raise ValueError("negative exponent")
                v = rat(v)
                if v:
                    c[(int(i), int(j))] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict[tuple[int, int], mpq]) -> Poly2:
        p = cls.__new__(cls)
        p._c = c
        p._hash = None
        return p

    @classmethod
    def const(cls, value: Number) -> Poly2:
        return cls({(0, 0): value})

    @classmethod
    def D(cls) -> Poly2:
        return cls({(1, 0): 1})

    @classmethod
    def x(cls) -> Poly2:
        return cls({(0, 1): 1})

    @classmethod
    def monomial(cls, i: int, j: int, coeff: Number = 1) -> Poly2:
        return cls({(i, j): coeff})

    @classmethod
    def from_poly1(cls, p: Poly1) -> Poly2:
        """Embed a univariate polynomial; tag ``D`` goes to the first slot, anything else to x."""
        if p.var == "D":
            return cls._raw({(e, 0): v for e, v in p._c.items()})
        return cls._raw({(0, e): v for e, v in p._c.items()})

    def zero(self) -> Poly2:
        return Poly2._raw({})

    def one(self) -> Poly2:
        return Poly2._raw({(0, 0): mpq(1)})

    @property
    def deg_D(self):
        return max(i for i, _ in self._c) if self._c else NEG_INF

    @property
    def deg_x(self):
        return max(j for _, j in self._c) if self._c else NEG_INF

    @property
    def degree(self):
        return max(i + j for i, j in self._c) if self._c else NEG_INF

    def is_zero(self) -> bool:
        return not self._c

    def is_constant(self) -> bool:
        return not self._c or (len(self._c) == 1 and (0, 0) in self._c)

    def coeff(self, i: int, j: int) -> mpq:
        return self._c.get((i, j), mpq(0))

    def items(self) -> list[tuple[tuple[int, int], mpq]]:
        return sorted(self._c.items())

    def terms(self) -> dict[tuple[int, int], mpq]:
        return dict(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def _coerce(self, other):
        if isinstance(other, Poly2):
            return other
        if isinstance(other, Poly1):
            raise VariableMismatch("cannot mix Poly1 and Poly2; embed with Poly2.from_poly1")
        if _is_scalar(other):
            return Poly2.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c = dict(self._c)
        for k, v in o._c.items():
            s = c.get(k, 0) + v
            if s:
                c[k] = s
            else:
                c.pop(k, None)
        return Poly2._raw(c)

    __radd__ = __add__

    def __neg__(self) -> Poly2:
        return Poly2._raw({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        if _is_scalar(other) and not isinstance(other, (Poly1, Poly2)):
            s = rat(other)
            if not s:
                return self.zero()
            return Poly2._raw({k: v * s for k, v in self._c.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        c: dict[tuple[int, int], mpq] = {}
        for (i1, j1), v1 in self._c.items():
            for (i2, j2), v2 in o._c.items():
                k = (i1 + i2, j1 + j2)
                c[k] = c.get(k, 0) + v1 * v2
        return Poly2._raw({k: v for k, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly2:
        if k < 0:
            raise ValueError("negative power")
        result, base = self.one(), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly2):
            return self._c == other._c
        if _is_scalar(other) and not isinstance(other, Poly1):
            v = rat(other)
            return self._c == ({(0, 0): v} if v else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Poly2", frozenset(self._c.items())))
        return self._hash

    def partial(self, var: str, order: int = 1) -> Poly2:
        """Iterated partial derivative in ``D`` or ``x``."""
        if order < 0:
            raise ValueError("negative derivative order")
        if var == "x":
            return Poly2._raw(
                {(i, j - order): v * falling(j, order) for (i, j), v in self._c.items() if j >= order}
            )
        if var == "D":
            return Poly2._raw(
                {(i - order, j): v * falling(i, order) for (i, j), v in self._c.items() if i >= order}
            )
        raise ValueError(f"unknown variable {var!r}")

    def mul_D(self, k: int = 1) -> Poly2:
        return Poly2._raw({(i + k, j): v for (i, j), v in self._c.items()})

    def x_to_y_plus_D(self) -> Poly2:
        """Rewrite p(D, x) as a polynomial in (D, y) with x = y + D; second slot becomes y."""
        c: dict[tuple[int, int], mpq] = {}
        for (i, j), v in self._c.items():
            for k in range(j + 1):
                key = (i + j - k, k)
                c[key] = c.get(key, 0) + v * math.comb(j, k)
        return Poly2._raw({k: v for k, v in c.items() if v})

    def y_to_x_minus_D(self) -> Poly2:
        """Inverse of :meth:`x_to_y_plus_D`: second slot y is replaced by x - D."""
        c: dict[tuple[int, int], mpq] = {}
        for (i, j), v in self._c.items():
            for k in range(j + 1):
                key = (i + j - k, k)
                term = v * math.comb(j, k) * (-1) ** (j - k)
                c[key] = c.get(key, 0) + term
        return Poly2._raw({k: v for k, v in c.items() if v})

    def coeffs_in_x(self) -> dict[int, Poly1]:
        """Map x-exponent -> coefficient polynomial in D."""
        out: dict[int, dict[int, mpq]] = {}
        for (i, j), v in self._c.items():
            out.setdefault(j, {})[i] = v
        return {j: Poly1._raw(c, "D") for j, c in out.items()}

    @classmethod
    def from_coeffs_in_x(cls, coeffs: Mapping[int, Poly1]) -> Poly2:
        c: dict[tuple[int, int], mpq] = {}
        for j, p in coeffs.items():
            for i, v in p._c.items():
                c[(i, j)] = v
        return cls._raw(c)

    def divmod_second(self, s: Poly1) -> tuple[Poly2, Poly2]:
        """Divide by a monic polynomial in the second slot, over k[D]."""
        if not s or s.lc() != 1:
            raise ValueError("divisor must be monic and nonzero")
        ds = s.degree
        rows = {j: p for j, p in self.coeffs_in_x().items()}
        q: dict[int, Poly1] = {}
        zero = Poly1._raw({}, "D")
        while rows:
            top = max(rows)
            if top < ds:
                break
            f = rows.pop(top)
            q[top - ds] = f
            for e, v in s._c.items():
                if e == ds:
                    continue
                k = top - ds + e
                r = rows.get(k, zero) - f * v
                if r:
                    rows[k] = r
                else:
                    rows.pop(k, None)
        return Poly2.from_coeffs_in_x(q), Poly2.from_coeffs_in_x(rows)

    def __str__(self) -> str:
        keys = sorted(self._c, key=lambda k: (-(k[0] + k[1]), -k[0]))
        return _format_terms(((k, self._c[k]) for k in keys), _mono2)

    def __repr__(self) -> str:
        return f"Poly2({str(self)!r})"


def _mono(var: str, e: int) -> str:
    if e == 0:
        return ""
    return var if e == 1 else f"{var}^{e}"


def _mono2(k: tuple[int, int]) -> str:
    parts = [p for p in (_mono("D", k[0]), _mono("x", k[1])) if p]
    return "*".join(parts)


def _format_terms(terms: Iterable, mono: Callable) -> str:
    out: list[str] = []
    for key, v in terms:
        m = mono(key)
        neg = v < 0
        a = -v if neg else v
        if not m:
            body = format_rat(a)
        elif a == 1:
            body = m
        else:
            body = f"{format_rat(a)}*{m}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f"- {body}" if neg else f"+ {body}")
    return " ".join(out) if out else "0"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[A-Za-z]+)|(?P<op>[+\-*^]))")


def parse_terms(text: str, allowed: Sequence[str], line: int = 1, col0: int = 1) -> dict[tuple[int, ...], mpq]:
    """Parse the polynomial grammar into {exponent tuple (ordered as ``allowed``): coeff}."""
    pos = 0
    n = len(text)
    toks: list[tuple[str, str, int]] = []
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", line, col0 + bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), col0 + start))
        pos = m.end()
    if not toks:
        raise ParseError("empty polynomial", line, col0)
    index = {v: k for k, v in enumerate(allowed)}
    result: dict[tuple[int, ...], mpq] = {}
    i = 0

    def expect_factor():
        nonlocal i
        if i >= len(toks):
            raise ParseError("unexpected end of polynomial", line, col0 + len(text))
        kind, val, col = toks[i]
        if kind == "num":
            i += 1
            if "/" in val and int(val.split("/")[1]) == 0:
                raise ParseError("zero denominator", line, col)
            return ("num", mpq(val), col)
        if kind == "var":
            if val not in index:
                raise ParseError(f"unknown variable {val!r} (allowed: {', '.join(allowed)})", line, col)
            i += 1
            e = 1
            if i < len(toks) and toks[i][0] == "op" and toks[i][1] == "^":
                i += 1
                if i >= len(toks) or toks[i][0] != "num" or "/" in toks[i][1]:
                    c = toks[i][2] if i < len(toks) else col0 + len(text)
                    raise ParseError("exponent must be a non-negative integer", line, c)
                e = int(toks[i][1])
                i += 1
            return ("var", (index[val], e), col)
        raise ParseError(f"unexpected {val!r}", line, col)

    first = True
    while i < len(toks):
        sign = 1
        if toks[i][0] == "op" and toks[i][1] in "+-":
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            raise ParseError(f"expected '+' or '-', got {toks[i][1]!r}", line, toks[i][2])
        first = False
        coeff = mpq(sign)
        exps = [0] * len(allowed)
        while True:
            kind, val, _ = expect_factor()
            if kind == "num":
                coeff *= val
            else:
                exps[val[0]] += val[1]
            if i < len(toks) and toks[i][0] == "op" and toks[i][1] == "*":
                i += 1
                continue
            break
        key = tuple(exps)
        s = result.get(key, 0) + coeff
        if s:
            result[key] = s
        else:
            result.pop(key, None)
    return result


def parse_poly2(text: str, line: int = 1, col0: int = 1) -> Poly2:
    terms = parse_terms(text, ("D", "x"), line, col0)
    return Poly2._raw({(k[0], k[1]): v for k, v in terms.items()})


def parse_poly1(text: str, var: str = "x", line: int = 1, col0: int = 1) -> Poly1:
    terms = parse_terms(text, (var,), line, col0)
    return Poly1._raw({k[0]: v for k, v in terms.items()}, var)


def detect_variable(text: str, candidates: Sequence[str] = VAR_TAGS) -> str | None:
    names = set(re.findall(r"[A-Za-z]+", text))
    found = [c for c in candidates if c in names]
    if len(found) > 1:
        raise ParseError(f"expected a single variable, found {', '.join(found)}")
    return found[0] if found else None


# ---------------------------------------------------------------------------
# matrices

Entry = Union[Poly1, Poly2]


class PolyMatrix:
    """Dense, immutable matrix of Poly1 or Poly2 entries."""

    __slots__ = ("rows", "cols", "entries", "_hash")

    def __init__(self, entries: Sequence[Sequence[Entry]]):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise ShapeError("matrix must be nonempty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged matrix")
        self.rows = len(rows)
        self.cols = len(rows[0])
        self.entries = rows
        self._hash = None

    @classmethod
    def identity(cls, n: int, like: Entry) -> PolyMatrix:
        z, o = like.zero(), like.one()
        return cls([[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int, like: Entry) -> PolyMatrix:
        z = like.zero()
        return cls([[z] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, items: Sequence[Entry]) -> PolyMatrix:
        z = items[0].zero()
        n = len(items)
        return cls([[items[i] if i == j else z for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Entry:
        i, j = ij
        return self.entries[i][j]

    def __iter__(self) -> Iterator[tuple[Entry, ...]]:
        return iter(self.entries)

    def like(self) -> Entry:
        return self.entries[0][0]

    def map(self, f: Callable[[Entry], Entry]) -> PolyMatrix:
        return PolyMatrix([[f(e) for e in row] for row in self.entries])

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        return self + (-other)

    def __neg__(self) -> PolyMatrix:
        return self.map(lambda e: -e)

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
            z = self.like().zero()
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = z
                    for k in range(self.cols):
                        a = self.entries[i][k]
                        if a:
                            b = other.entries[k][j]
                            if b:
                                acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return PolyMatrix(out)
        return self.map(lambda e: e * other)

    def __rmul__(self, other):
        return self.map(lambda e: other * e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.entries)
        return self._hash

    def is_zero(self) -> bool:
        return all(not e for row in self.entries for e in row)

    def det(self) -> Entry:
        return mat_det(self)

    def __str__(self) -> str:
        return "\n".join(", ".join(str(e) for e in row) for row in self.entries)

    def __repr__(self) -> str:
        return f"PolyMatrix({[[str(e) for e in r] for r in self.entries]})"


def mat_arith(a: PolyMatrix, b: PolyMatrix, op: str) -> PolyMatrix:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_arith(a: Entry, b: Entry, op: str) -> Entry:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def mat_det(a: PolyMatrix) -> Entry:
    """Determinant by cofactor expansion with memoization over column subsets."""
    if not a.is_square():
        raise ShapeError("determinant of a non-square matrix")
    n = a.rows
    memo: dict[tuple[int, int], Entry] = {}
    zero = a.like().zero()

    def minor(row: int, mask: int) -> Entry:
        # determinant of rows row.., columns in mask
        if row == n:
            return a.like().one()
        key = (row, mask)
        if key in memo:
            return memo[key]
        acc = zero
        sign = 1
        for j in range(n):
            if mask >> j & 1:
                e = a.entries[row][j]
                if e:
                    sub = minor(row + 1, mask & ~(1 << j))
                    if sub:
                        acc = acc + e * sub if sign > 0 else acc - e * sub
                sign = -sign
        memo[key] = acc
        return acc

    return minor(0, (1 << n) - 1)


def shift_substitute(p: Poly1, alpha: Number) -> Poly1:
    return p.shift(alpha)


def partial_derivative(p: Poly2, var: str, order: int) -> Poly2:
    return p.partial(var, order)


def embed_y_to_x_minus_D(q: PolyMatrix) -> PolyMatrix:
    """Substitute y -> x - D in a univariate polynomial matrix, giving entries in k[D, x]."""
    return q.map(lambda e: Poly2.from_poly1(e.retag("x")).y_to_x_minus_D())


def parse_polymatrix(text: str, var: str | None = None, first_line: int = 1) -> PolyMatrix:
    """Parse a univariate polynomial matrix: one row per line, entries separated by commas.

    Blank lines and ``#`` comments are skipped.  The variable is detected from
    the content (default ``y``) unless given.
    """
    rows_src: list[tuple[int, str]] = []
    for k, raw in enumerate(text.splitlines()):
        body = raw.split("#", 1)[0]
        if body.strip():
            rows_src.append((first_line + k, body))
    if not rows_src:
        raise ParseError("empty matrix", first_line, 1)
    if var is None:
        try:
            var = detect_variable("\n".join(b for _, b in rows_src)) or "y"
        except ParseError as exc:
            raise ParseError(exc.msg, rows_src[0][0], 1) from None
    rows: list[list[Poly1]] = []
    for lineno, body in rows_src:
        row: list[Poly1] = []
        col = 1
        for cell in body.split(","):
            if not cell.strip():
                raise ParseError("empty matrix entry", lineno, col)
            row.append(parse_poly1(cell, var, lineno, col))
            col += len(cell) + 1
        if rows and len(row) != len(rows[0]):
            raise ParseError(f"row has {len(row)} entries, expected {len(rows[0])}", lineno, 1)
        rows.append(row)
    return PolyMatrix(rows)


def format_polymatrix(m: PolyMatrix, sep: str = "\n") -> str:
    return sep.join(", ".join(str(e) for e in row) for row in m.entries)
