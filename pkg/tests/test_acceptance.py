"""End-to-end acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line with its counts and runtime;
the lines are printed in the pytest terminal summary and also when this file
is run directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import random
import sys
import time
from pathlib import Path

import pytest
from gmpy2 import mpq

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES  # noqa: E402

from confalg import sampling  # noqa: E402
from confalg.algebras import cend, cendq, curr, default_generators, is_idempotent, is_unit, membership  # noqa: E402
from confalg.cli import run  # noqa: E402
from confalg.core import ConformalElement, TensorHH, fourier, product_table  # noqa: E402
from confalg.exactpoly import Poly1, Poly2, PolyMatrix  # noqa: E402
from confalg.growth import gk_profile  # noqa: E402
from confalg.isom import Reason, iso_test  # noqa: E402
from confalg.smith import is_unimodular, smith_normal_form  # noqa: E402
from confalg.sweeps import identity_sweep, residue_sweep, weyl_sweep  # noqa: E402

SEED = 20240601


def record(number: int, title: str, ok: bool, detail: str, elapsed: float) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail} ({elapsed:.2f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_01_axioms():
    start = time.perf_counter()
    results = [identity_sweep(tag, SEED, 500, size=3, deg=4) for tag in ("C1", "C2", "C3")]
    elapsed = time.perf_counter() - start
    ok = all(r.ok and r.samples >= 500 for r in results) and elapsed < 10
    detail = ", ".join(f"{r.name} {r.samples} pairs/{r.checks} checks" for r in results)
    record(1, "axioms C1-C3", ok, detail, elapsed)
    for r in results:
        assert r.ok, r.failure
        assert r.samples >= 500
    assert results[1].nonzero > 500 and results[2].nonzero > 500
    assert elapsed < 10


def test_02_associativity():
    start = time.perf_counter()
    tags = ("conf-ass", "conf-ass1", "eq2.2.1", "eq2.2.2", "eq2.2.3", "eq2.2.4")
    results = [identity_sweep(tag, SEED + 1, 200, size=3, deg=4) for tag in tags]
    elapsed = time.perf_counter() - start
    ok = all(r.ok and r.samples >= 200 for r in results) and elapsed < 60
    detail = ", ".join(f"{r.name} {r.checks}" for r in results) + " index checks on 200 triples"
    record(2, "associativity and curly identities", ok, detail, elapsed)
    for r in results:
        assert r.ok, r.failure
        assert r.samples >= 200 and r.nonzero > 1000
    assert elapsed < 60


def test_03_fourier():
    start = time.perf_counter()
    bad = []
    for n in range(11):
        for m in range(11):
            b = TensorHH.basis(n, m)
            if fourier(fourier(b), inverse=True) != b or fourier(fourier(b, inverse=True)) != b:
                bad.append((n, m))
    elapsed = time.perf_counter() - start
    record(3, "Fourier inverse", not bad, f"121 basis tensors, {len(bad)} failures", elapsed)
    assert not bad


def test_04_oracles():
    start = time.perf_counter()
    w = weyl_sweep(SEED + 2, 200, size=2, deg=3)
    r = residue_sweep(SEED + 3, 100, size=2, deg=3)
    elapsed = time.perf_counter() - start
    ok = w.ok and r.ok and w.checks >= 200 and r.samples >= 100
    detail = f"weyl {w.checks} (a,b,n,m,probe) tuples from {w.samples} pairs; residue {r.samples} symbol pairs/{r.checks} products"
    record(4, "oracle agreement", ok, detail, elapsed)
    assert w.ok, w.failure
    assert r.ok, r.failure
    assert w.checks >= 200 and r.samples >= 100


def test_05_growth():
    start = time.perf_counter()
    p_curr = gk_profile(default_generators(curr(2)), 6)
    one, x = ConformalElement.identity(1), ConformalElement.scalar(Poly2.x())
    p_cend = gk_profile([one, x], 8)
    p_q = gk_profile(default_generators(cendq(PolyMatrix([[Poly1.gen("y")]]))), 6)
    elapsed = time.perf_counter() - start
    checks = [
        p_curr.d == (4,) * 6 and p_curr.verdict == "finite",
        p_cend.d == tuple(range(2, 10)) and p_cend.verdict == "linear",
        p_q.verdict == "linear",
        elapsed < 120,
    ]
    detail = f"Curr_2 d={p_curr.d} {p_curr.verdict}; Cend_1 d={p_cend.d} {p_cend.verdict}; Cend_1,(y) d={p_q.d} {p_q.verdict}"
    record(5, "growth profiles", all(checks), detail, elapsed)
    assert all(checks)


def _shift(q: PolyMatrix, a) -> PolyMatrix:
    return q.map(lambda p: p.shift(a))


def test_06_isomorphism():
    start = time.perf_counter()
    x = Poly1.gen("x")
    v1 = iso_test(PolyMatrix([[x]]), PolyMatrix([[x + 3]]))
    v2 = iso_test(PolyMatrix([[x]]), PolyMatrix([[x**2]]))
    ok_examples = v1.isomorphic and v1.alpha == -3 and (x == (x + 3).shift(v1.alpha))
    ok_examples = ok_examples and not v2.isomorphic and v2.reason is Reason.DEGREE_MISMATCH
    rng = random.Random(SEED + 4)
    unimod_ok = shift_ok = 0
    for _ in range(50):
        n = rng.randint(1, 3)
        q = sampling.nonsingular(rng, n, 2, "x")
        u, w = sampling.unimodular(rng, n, "x"), sampling.unimodular(rng, n, "x")
        v = iso_test(q, u * q * w)
        unimod_ok += v.isomorphic and v.alpha == 0
    for _ in range(50):
        n = rng.randint(1, 3)
        q = sampling.nonsingular(rng, n, 2, "x")
        a0 = mpq(rng.randint(-9, 9), rng.randint(1, 5))
        v = iso_test(q, _shift(q, a0))
        shift_ok += v.isomorphic and all(f == g.shift(v.alpha) for f, g in zip(v.canonical_p, v.canonical_q))
    elapsed = time.perf_counter() - start
    ok = ok_examples and unimod_ok == 50 and shift_ok == 50
    detail = f"examples ok={ok_examples}; unimodular {unimod_ok}/50; shift {shift_ok}/50; alpha((x),(x+3))={v1.alpha}"
    record(6, "isomorphism test", ok, detail, elapsed)
    assert ok


def test_07_snf():
    start = time.perf_counter()
    rng = random.Random(SEED + 5)
    good = 0
    for _ in range(200):
        n = rng.randint(1, 3)
        a = sampling.polymatrix(rng, n, 4)
        res = smith_normal_form(a)
        f = res.invariant_factors
        chain = all(b % c == Poly1({}, "t") for c, b in zip(f, f[1:]))
        good += (
            res.U * a * res.V == res.S
            and is_unimodular(res.U)
            and is_unimodular(res.V)
            and all(p.lc() == 1 for p in f)
            and chain
        )
    elapsed = time.perf_counter() - start
    ok = good == 200 and elapsed < 30
    record(7, "Smith normal form contract", ok, f"{good}/200 matrices", elapsed)
    assert good == 200
    assert elapsed < 30


def test_08_closure():
    start = time.perf_counter()
    rng = random.Random(SEED + 6)
    counts = {"curr": 0, "cendq": 0}
    products = bad = 0
    for _ in range(200):
        spec = curr(rng.randint(1, 2))
        a, b = sampling.member(rng, spec, 3), sampling.member(rng, spec, 3)
        for p in product_table(a, b):
            products += 1
            bad += not membership(spec, p).member
        counts["curr"] += 1
    for _ in range(200):
        n = rng.randint(1, 2)
        spec = cendq(sampling.nonsingular(rng, n, 2, "y"))
        a, b = sampling.member(rng, spec, 2), sampling.member(rng, spec, 2)
        for p in product_table(a, b):
            products += 1
            bad += not membership(spec, p).member
        counts["cendq"] += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and counts["curr"] >= 200 and counts["cendq"] >= 200
    detail = f"{counts['curr']} Curr_N pairs, {counts['cendq']} Cend_N,Q pairs, {products} products, {bad} outside"
    record(8, "subalgebra closure", ok, detail, elapsed)
    assert ok


def test_09_unit_idempotent():
    start = time.perf_counter()
    checks = {}
    for n in (1, 2, 3):
        ident = ConformalElement.identity(n)
        checks[f"Id_{n} unit"] = is_unit(ident, default_generators(cend(n)))
    y = Poly1.gen("y")
    spec = cendq(PolyMatrix.diag([Poly1.const(1, "y"), y]))
    e11 = ConformalElement.unit(2, 0, 0)
    checks["E11 idempotent"] = is_idempotent(e11)
    checks["E11 member"] = membership(spec, e11).member
    x = ConformalElement.scalar(Poly2.x())
    checks["x refused as idempotent"] = not is_idempotent(x)
    checks["x refused as unit"] = not is_unit(x, default_generators(cend(1)))
    elapsed = time.perf_counter() - start
    ok = all(checks.values())
    record(9, "unit and idempotent", ok, ", ".join(f"{k}={v}" for k, v in checks.items()), elapsed)
    assert ok


CLI_INPUTS = {
    "a.ce": "N=1; [1,1]: x\n",
    "pair.ce": "N=1; [1,1]: x\n---\nN=1; [1,1]: 1\n",
    "e.ce": "N=1; [1,1]: x - D\n",
    "id2.ce": "N=2; [1,1]: 1; [2,2]: 1\n",
    "q.pm": "y\n",
    "p.pm": "x\n",
    "p3.pm": "x + 3\n",
    "m.pm": "t, 1\n0, t\n",
}

CLI_COMMANDS = [
    ["product", "a.ce", "a.ce", "--n", "1"],
    ["check", "conf-ass", "--random", "100", "--seed", "7", "--size", "2", "--deg", "3"],
    ["check", "commutativity", "pair.ce"],
    ["gk", "--spec", "cend 1", "--nmax", "8"],
    ["iso", "p.pm", "p3.pm"],
    ["member", "--spec", "cendq 1 q.pm", "--elem", "e.ce"],
    ["unit", "--elem", "id2.ce"],
    ["idem", "--elem", "id2.ce"],
    ["snf", "m.pm"],
    ["oracle", "--random", "50", "--seed", "42"],
]


def test_10_cli_determinism(tmp_path, monkeypatch):
    for name, text in CLI_INPUTS.items():
        (tmp_path / name).write_text(text)
    monkeypatch.chdir(tmp_path)
    start = time.perf_counter()
    stable = 0
    for argv in CLI_COMMANDS:
        for fmt in ("report", "kv"):
            outputs = set()
            for _ in range(3):
                out, err = io.StringIO(), io.StringIO()
                code = run(argv + ["--format", fmt], out, err)
                outputs.add((code, out.getvalue().encode(), err.getvalue().encode()))
            stable += len(outputs) == 1
    elapsed = time.perf_counter() - start
    total = 2 * len(CLI_COMMANDS)
    record(10, "CLI determinism", stable == total, f"{stable}/{total} command/format combinations byte-identical over 3 runs", elapsed)
    assert stable == total


if __name__ == "__main__":
    import tempfile

    class _Patch:
        def chdir(self, path):
            import os

            os.chdir(path)

    failures = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if name == "test_10_cli_determinism":
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d), _Patch())
            else:
                fn()
        except AssertionError:
            failures += 1
    sys.exit(1 if failures else 0)
