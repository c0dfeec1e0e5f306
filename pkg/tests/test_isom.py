from __future__ import annotations

import random

import pytest
from gmpy2 import mpq

from confalg import sampling
from confalg.exactpoly import Poly1, PolyMatrix, ShapeError
from confalg.isom import Reason, canonical_form, iso_test
from confalg.smith import SingularMatrixError

from conftest import pm

x = Poly1.gen("x")
one = Poly1.const(1, "x")


def shifted(q: PolyMatrix, alpha) -> PolyMatrix:
    return q.map(lambda p: p.shift(alpha))


def assert_verified(v):
    assert v.isomorphic and v.alpha is not None
    for f, g in zip(v.canonical_p, v.canonical_q):
        assert f == g.shift(v.alpha)


class TestCanonicalForm:
    def test_examples(self):
        t = Poly1.gen("t")
        assert canonical_form(PolyMatrix.diag([Poly1.const(1, "t"), t])) == (Poly1.const(1, "t"), t)
        assert canonical_form(pm([["t", "1"], ["0", "t"]])) == (Poly1.const(1, "t"), t**2)
        assert canonical_form(pm([["t + 3"]])) == (t + 3,)

    def test_errors(self):
        with pytest.raises(SingularMatrixError):
            canonical_form(pm([["t", "t"], ["1", "1"]]))
        with pytest.raises(ShapeError):
            canonical_form(pm([["t", "1"]]))


class TestIsoExamples:
    def test_shift(self):
        v = iso_test(PolyMatrix([[x]]), PolyMatrix([[x + 3]]))
        assert_verified(v)
        assert v.alpha == -3 and v.reason is Reason.MATCH

    def test_degree_mismatch(self):
        v = iso_test(PolyMatrix([[x]]), PolyMatrix([[x**2]]))
        assert not v.isomorphic and v.reason is Reason.DEGREE_MISMATCH and v.alpha is None

    def test_full_algebra(self):
        v = iso_test(PolyMatrix([[one]]), PolyMatrix([[one * 5]]))
        assert v.isomorphic and v.alpha == 0

    def test_jordan_block(self):
        v = iso_test(PolyMatrix.diag([one, x]), pm([["x", "1"], ["0", "x"]], "x"))
        assert not v.isomorphic
        assert v.canonical_p == (one, x) and v.canonical_q == (one, x**2)

    def test_size_mismatch(self):
        v = iso_test(PolyMatrix([[x]]), PolyMatrix.diag([one, x]))
        assert v.reason is Reason.SIZE_MISMATCH and not v

    def test_factor_mismatch(self):
        # same degrees, but no single shift matches both factors
        p = PolyMatrix.diag([x, x * (x + 1)])
        q = PolyMatrix.diag([x, x * (x + 2)])
        v = iso_test(p, q)
        assert not v.isomorphic and v.reason is Reason.FACTOR_MISMATCH
        v = iso_test(PolyMatrix([[x**2]]), PolyMatrix([[x**2 + 1]]))
        assert v.reason is Reason.FACTOR_MISMATCH

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            iso_test(PolyMatrix([[x]]), PolyMatrix([[Poly1({}, "x")]]))


class TestIsoProperties:
    def test_reflexive_and_symmetric(self):
        rng = random.Random(1)
        for _ in range(30):
            n = rng.randint(1, 3)
            p = sampling.nonsingular(rng, n, 2, "x")
            v = iso_test(p, p)
            assert v.isomorphic and v.alpha == 0
            q = shifted(p, rng.randint(-4, 4)) if rng.random() < 0.5 else sampling.nonsingular(rng, n, 2, "x")
            a, b = iso_test(p, q), iso_test(q, p)
            assert a.isomorphic == b.isomorphic
            if a.isomorphic:
                assert a.alpha == -b.alpha

    def test_unimodular_invariance(self):
        rng = random.Random(2)
        for _ in range(30):
            n = rng.randint(1, 3)
            p = sampling.nonsingular(rng, n, 2, "x")
            u, w = sampling.unimodular(rng, n, "x"), sampling.unimodular(rng, n, "x")
            v = iso_test(p, u * p * w)
            assert v.isomorphic and v.alpha == 0

    def test_shift_soundness(self):
        rng = random.Random(3)
        for _ in range(30):
            n = rng.randint(1, 3)
            q = sampling.nonsingular(rng, n, 2, "x")
            a0 = mpq(rng.randint(-9, 9), rng.randint(1, 5))
            v = iso_test(q, shifted(q, a0))
            assert_verified(v)
            if any(f.degree >= 1 for f in v.canonical_p):
                assert v.alpha == -a0
