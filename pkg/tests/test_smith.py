from __future__ import annotations

import itertools
import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from confalg import sampling
from confalg.exactpoly import Poly1, PolyMatrix, mat_det
from confalg.smith import (
    SingularMatrixError,
    SNFDegreeError,
    invariant_factors,
    is_smith_form,
    is_unimodular,
    right_module_membership,
    smith_normal_form,
)

from conftest import pm, polymatrices

t = Poly1.gen("t")


def determinantal_factors(a: PolyMatrix) -> list[Poly1]:
    """Invariant factors as ratios of gcds of k x k minors (independent of elimination)."""
    n = min(a.rows, a.cols)
    divisors = [Poly1.const(1, a.like().var)]
    for k in range(1, n + 1):
        g = Poly1({}, a.like().var)
        for rows in itertools.combinations(range(a.rows), k):
            for cols in itertools.combinations(range(a.cols), k):
                minor = mat_det(PolyMatrix([[a[i, j] for j in cols] for i in rows]))
                g = g.gcd(minor) if g or minor else g
        if not g:
            break
        divisors.append(g.monic())
    return [divisors[k] // divisors[k - 1] for k in range(1, len(divisors))]


def solve_membership(e: PolyMatrix, q: PolyMatrix, deg: int):
    """Search M with entries of degree <= deg and M Q = E by solving the linear system exactly."""
    n = q.rows
    var = q.like().var
    s = sympy.Symbol(var)
    unknowns = {(i, k, d): sympy.Symbol(f"m_{i}_{k}_{d}") for i in range(n) for k in range(n) for d in range(deg + 1)}
    eqs = []
    for i in range(n):
        for j in range(n):
            expr = sum(
                unknowns[(i, k, d)] * s**d * sympy.sympify(str(q[k, j]).replace("^", "**"), locals={var: s})
                for k in range(n)
                for d in range(deg + 1)
            )
            expr -= sympy.sympify(str(e[i, j]).replace("^", "**"), locals={var: s})
            eqs.extend(sympy.Poly(sympy.expand(expr), s).all_coeffs())
    sol = sympy.linsolve(eqs, list(unknowns.values()))
    return bool(sol) and sol != sympy.EmptySet


class TestExamples:
    def test_already_diagonal(self):
        assert invariant_factors(PolyMatrix.diag([t, t])) == (t, t)

    def test_antidiagonal(self):
        a = pm([["0", "1"], ["t^2", "0"]])
        res = smith_normal_form(a)
        assert res.invariant_factors == (Poly1.const(1, "t"), t**2)
        assert res.U * a * res.V == res.S

    def test_jordan_block(self):
        a = pm([["t", "1"], ["0", "t"]])
        res = smith_normal_form(a)
        assert res.invariant_factors == (Poly1.const(1, "t"), t**2)
        assert is_smith_form(res, a)

    def test_unimodular(self):
        assert is_unimodular(PolyMatrix.identity(3, t))
        assert is_unimodular(pm([["1", "t"], ["0", "1"]]))
        assert not is_unimodular(pm([["t", "0"], ["0", "1"]]))

    def test_zero_and_rectangular(self):
        z = PolyMatrix.zeros(2, 3, t)
        res = smith_normal_form(z)
        assert res.invariant_factors == () and res.rank == 0
        a = pm([["t", "t^2", "1 + t"]])
        res = smith_normal_form(a)
        assert res.invariant_factors == (Poly1.const(1, "t"),)
        assert res.U * a * res.V == res.S

    def test_degree_cap(self):
        a = pm([["t^3", "t^2 + 1"], ["t + 1", "t^4"]])
        with pytest.raises(SNFDegreeError):
            smith_normal_form(a, degree_cap=2)


class TestProperties:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @given(data=st.data())
    def test_contract(self, n, data):
        a = data.draw(polymatrices(n, max_deg=3))
        res = smith_normal_form(a)
        assert res.U * a * res.V == res.S
        assert is_unimodular(res.U) and is_unimodular(res.V)
        f = res.invariant_factors
        assert all(p.lc() == 1 for p in f)
        assert all(b % a_ == Poly1({}, "t") for a_, b in zip(f, f[1:]))
        for i in range(n):
            for j in range(n):
                want = f[i] if i == j and i < len(f) else Poly1({}, "t")
                assert res.S[i, j] == want

    @given(polymatrices(3, max_deg=2))
    def test_matches_determinantal_divisors(self, a):
        assert list(invariant_factors(a)) == determinantal_factors(a)

    def test_unimodular_invariance(self):
        rng = random.Random(11)
        for _ in range(40):
            n = rng.randint(1, 3)
            a = sampling.polymatrix(rng, n, 3)
            u, v = sampling.unimodular(rng, n), sampling.unimodular(rng, n)
            assert invariant_factors(u * a * v) == invariant_factors(a)


class TestMembership:
    def test_examples(self):
        q = pm([["1", "0"], ["0", "t"]])
        r = right_module_membership(q, q)
        assert r.member and r.witness == PolyMatrix.identity(2, t)
        assert not right_module_membership(PolyMatrix.identity(2, t), q)
        e = PolyMatrix.diag([t**2, t**2])
        r = right_module_membership(e, q)
        assert r.member and r.witness == PolyMatrix.diag([t**2, t])

    def test_refusal_certificate(self):
        q = pm([["1", "0"], ["0", "t"]])
        r = right_module_membership(PolyMatrix.identity(2, t), q)
        assert r.column == 1 and r.witness is None

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            right_module_membership(PolyMatrix.identity(2, t), pm([["t", "t"], ["1", "1"]]))

    def test_witness_degree_can_exceed_target_degree(self):
        # E = I has degree 0, yet the only M with M Q = I is Q^-1 = [[1, -t], [0, 1]].
        q = pm([["1", "t"], ["0", "1"]])
        assert not solve_membership(PolyMatrix.identity(2, t), q, 0)
        r = right_module_membership(PolyMatrix.identity(2, t), q)
        assert r.member and r.witness == pm([["1", "-t"], ["0", "1"]])

    def test_agrees_with_linear_solve(self):
        rng = random.Random(5)
        agree = members = 0
        for k in range(60):
            n = rng.randint(1, 2)
            q = sampling.nonsingular(rng, n, 2)
            if k % 2:
                e = sampling.polymatrix(rng, n, 1) * q
            else:
                e = sampling.polymatrix(rng, n, 3)
            deg_e = max((p.degree for row in e.entries for p in row if p), default=0)
            deg_q = max((p.degree for row in q.entries for p in row if p), default=0)
            r = right_module_membership(e, q)
            if r.member:
                assert r.witness * q == e
                members += 1
            assert r.member == solve_membership(e, q, deg_e + (n - 1) * deg_q)
            agree += 1
        assert members >= 20 and agree == 60
