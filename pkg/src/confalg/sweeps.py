"""Seeded randomized sweeps over identities and oracles.

Each sweep draws its samples with :mod:`confalg.sampling` from one
``random.Random(seed)``, checks them in order and stops at the first
failure, so the same seed and caps always give the same report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import sampling
from .core import ARITY, ConformalElement, ProductCache, UnknownIdentity, check_identity, n_product, product_table, sweep_ranges
from .oracles.residue import embed_current, residue_matches_brute_force, residue_n_product, residue_product
from .oracles.weyl import VNElement, oracle_check_product


@dataclass
class SweepResult:
    name: str
    samples: int = 0
    checks: int = 0
    nonzero: int = 0
    failure: Optional[str] = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failure is None


def identity_sweep(
    tag: str,
    seed: int,
    count: int,
    size: int = 2,
    deg: int = 3,
    elements: Optional[Sequence[ConformalElement]] = None,
) -> SweepResult:
    """Check ``tag`` on ``count`` random tuples, or on all tuples drawn from ``elements``.

    With explicit elements every ordered tuple (with repetition) of matching
    size is tried.
    """
    if tag not in ARITY:
        raise UnknownIdentity(f"unknown identity {tag!r}")
    k = ARITY[tag][0]
    res = SweepResult(tag)
    cache = ProductCache()
    if elements is not None:
        tuples = _ordered_tuples(list(elements), k)
    else:
        rng = sampling.make_rng(seed)
        tuples = (sampling.element_tuple(rng, k, size, deg) for _ in range(count))
    for els in tuples:
        res.samples += 1
        if len({e.n for e in els}) != 1:
            continue
        for idx in sweep_ranges(tag, els, cache):
            chk = check_identity(tag, els, idx, cache)
            res.checks += 1
            if not chk.ok:
                res.failure = chk.report()
                return res
            if chk.lhs:
                res.nonzero += 1
    return res


def _ordered_tuples(elements: list, k: int):
    if k == 0:
        yield []
        return
    for e in elements:
        for rest in _ordered_tuples(elements, k - 1):
            yield [e, *rest]


def standard_probes(n: int, max_degree: int = 2) -> list[VNElement]:
    return [VNElement.basis(n, l, d) for l in range(n) for d in range(max_degree + 1)]


def weyl_sweep(seed: int, count: int, size: int = 2, deg: int = 3, probe_degree: int = 2) -> SweepResult:
    """``count`` random pairs; every (n, m) up to locality and every probe is one checked tuple."""
    rng = sampling.make_rng(seed)
    res = SweepResult("weyl")
    for _ in range(count):
        a, b = sampling.element_tuple(rng, 2, size, deg)
        probes = standard_probes(a.n, probe_degree) + [sampling.vn_element(rng, a.n, probe_degree + 2)]
        res.samples += 1
        top = len(product_table(a, b))
        for n in range(top + 1):
            for m in range(deg + 2):
                bad = oracle_check_product(a, b, n, m, probes)
                res.checks += len(probes)
                if bad is not None:
                    res.failure = bad.report()
                    return res
                if n < top:
                    res.nonzero += 1
    return res


def residue_sweep(seed: int, count: int, size: int = 2, deg: int = 3, window: int = 12) -> SweepResult:
    """Closed-form residue products against window brute force, all m up to locality plus one."""
    rng = sampling.make_rng(seed)
    res = SweepResult("residue")
    for _ in range(count):
        n = rng.randint(1, size)
        a, b = sampling.symbol(rng, n, deg), sampling.symbol(rng, n, deg)
        res.samples += 1
        top = int(a.weight.degree) + int(b.weight.degree) + 1
        for m in range(top + 1):
            res.checks += 1
            if not residue_matches_brute_force(a, b, m, window):
                res.failure = f"residue m={m}: a=({a.weight}, {a.coeff}, {a.shift}) b=({b.weight}, {b.coeff}, {b.shift})"
                return res
            if not residue_n_product(a, b, m).is_zero():
                res.nonzero += 1
    return res


def embedding_sweep(seed: int, count: int, size: int = 2, deg: int = 4) -> SweepResult:
    """Residue products of embedded current-algebra elements against core products."""
    rng = sampling.make_rng(seed)
    res = SweepResult("embedding")
    for _ in range(count):
        a, b = sampling.element_tuple(rng, 2, size, deg, x_free=True)
        res.samples += 1
        ea, eb = embed_current(a), embed_current(b)
        table = product_table(a, b)
        for m in range(len(table) + 1):
            res.checks += 1
            core = table[m] if m < len(table) else ConformalElement.zero(a.n)
            if residue_product(ea, eb, m) != embed_current(core):
                res.failure = f"embedding m={m}: a={a}; b={b}"
                return res
            if core:
                res.nonzero += 1
    return res


def a0_sweep(seed: int, count: int, size: int = 2, deg: int = 3) -> SweepResult:
    """(a (0) b) (0) x = a (0) (b (0) x) on random triples."""
    rng = sampling.make_rng(seed)
    res = SweepResult("a0")
    for _ in range(count):
        a, b, x = sampling.element_tuple(rng, 3, size, deg)
        res.samples += 1
        res.checks += 1
        lhs = n_product(n_product(a, b, 0), x, 0)
        if lhs != n_product(a, n_product(b, x, 0), 0):
            res.failure = f"a0: a={a}; b={b}; x={x}"
            return res
        if lhs:
            res.nonzero += 1
    return res


def oracle_suite(seed: int, count: int, size: int = 2, deg: int = 3) -> list[SweepResult]:
    """All oracle sweeps with seeds derived from ``seed``; stops after the first failing sweep."""
    out = []
    runs = [
        (weyl_sweep, count),
        (residue_sweep, max(1, count // 2)),
        (embedding_sweep, max(1, count // 2)),
        (a0_sweep, max(1, count // 2)),
    ]
    for k, (fn, c) in enumerate(runs):
        r = fn(seed + k, c, size, deg)
        out.append(r)
        if not r.ok:
            break
    return out
