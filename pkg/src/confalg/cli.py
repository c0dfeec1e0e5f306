"""Command-line interface.

Exit codes: 0 success or true, 1 a check came out false, 2 invalid input,
3 a resource cap was hit.  Output is fully determined by the inputs and
flags.  ``--format kv`` prints ``key=value`` lines with list values joined
by commas; :func:`parse_kv` and :func:`format_kv` are inverse to each other
on that output.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from . import algebras, growth, isom, smith, sweeps
from .core import IDENTITIES, ConformalElement, UnknownIdentity, format_element, n_product, parse_elements, product_table
from .exactpoly import ParseError, PolyMatrix, ShapeError, format_polymatrix, parse_polymatrix

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3

Value = Union[str, int, bool, Sequence[object]]


class InputError(Exception):
    """Invalid user input; reported with exit code 2."""


@dataclass
class Outcome:
    code: int
    kv: list[tuple[str, Value]]
    report: Optional[list[str]] = field(default=None)


def _scalar(v: object) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def format_kv(pairs: Sequence[tuple[str, Value]]) -> str:
    lines = []
    for k, v in pairs:
        if isinstance(v, (list, tuple)):
            v = ",".join(_scalar(x) for x in v)
        lines.append(f"{k}={_scalar(v)}")
    return "\n".join(lines) + "\n"


def parse_kv(text: str) -> list[tuple[str, str]]:
    """Parse kv output back into (key, raw value) pairs; split list values with ``split(',')``."""
    out = []
    for k, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected key=value", k, 1)
        key, value = line.split("=", 1)
        out.append((key, value))
    return out


def _render_report(outcome: Outcome) -> str:
    if outcome.report is not None:
        return "\n".join(outcome.report) + "\n"
    lines = []
    for k, v in outcome.kv:
        if isinstance(v, (list, tuple)):
            v = ", ".join(_scalar(x) for x in v)
        lines.append(f"{k}: {_scalar(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _elements(path: str) -> list[ConformalElement]:
    try:
        els = parse_elements(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}:{exc.line}:{exc.col}: {exc.msg}") from None
    if not els:
        raise InputError(f"{path}: no elements")
    return els


def _element(path: str) -> ConformalElement:
    els = _elements(path)
    if len(els) != 1:
        raise InputError(f"{path}: expected one element, found {len(els)}")
    return els[0]


def _matrix(path: str) -> PolyMatrix:
    try:
        return parse_polymatrix(_read(path))
    except ParseError as exc:
        raise InputError(f"{path}:{exc.line}:{exc.col}: {exc.msg}") from None


def _spec(text: str) -> algebras.AlgebraSpec:
    try:
        return algebras.parse_spec(text)
    except ParseError as exc:
        raise InputError(f"spec {text!r}: {exc.msg}") from None


def _show(e: ConformalElement) -> str:
    """N = 1 elements print as their polynomial, larger ones in the element format."""
    if not e:
        return "0"
    if e.n == 1:
        return str(e.entry(0, 0))
    return format_element(e, "; ")


def _report_element(e: ConformalElement) -> list[str]:
    if not e or e.n == 1:
        return [_show(e)]
    return format_element(e).splitlines()


# ---------------------------------------------------------------------------
# commands


def cmd_product(args) -> Outcome:
    els = [e for f in args.files for e in _elements(f)]
    if len(els) != 2:
        raise InputError(f"product needs exactly two elements, got {len(els)}")
    a, b = els
    if a.n != b.n:
        raise InputError(f"size mismatch: N={a.n} and N={b.n}")
    if args.n is not None:
        if args.n < 0:
            raise InputError("--n must be non-negative")
        p = n_product(a, b, args.n)
        return Outcome(EXIT_OK, [("n", args.n), ("element", _show(p))], _report_element(p))
    table = product_table(a, b)
    kv: list[tuple[str, Value]] = [("locality", len(table))]
    report = [f"locality: {len(table)}"]
    for n, p in enumerate(table):
        kv.append((f"product.{n}", _show(p)))
        report.append(f"n={n}: {_show(p)}")
    return Outcome(EXIT_OK, kv, report)


def cmd_check(args) -> Outcome:
    if args.identity not in IDENTITIES:
        raise InputError(f"unknown identity {args.identity!r}; known: {', '.join(IDENTITIES)}")
    if args.files:
        els = [e for f in args.files for e in _elements(f)]
        res = sweeps.identity_sweep(args.identity, args.seed, 0, elements=els)
    else:
        res = sweeps.identity_sweep(args.identity, args.seed, args.random, args.size, args.deg)
    kv: list[tuple[str, Value]] = [
        ("identity", args.identity),
        ("samples", res.samples),
        ("checks", res.checks),
        ("nonzero", res.nonzero),
        ("result", "pass" if res.ok else "fail"),
    ]
    if not res.ok:
        kv.append(("witness", res.failure))
    return Outcome(EXIT_OK if res.ok else EXIT_FALSE, kv)


def _profile_outcome(d: Sequence[int], verdict: str, estimate, window: int, code: int) -> Outcome:
    deltas, prev = [], 0
    for v in d:
        deltas.append(v - prev)
        prev = v
    report = ["n d_n delta"] + [f"{n} {v} {dv}" for n, (v, dv) in enumerate(zip(d, deltas), start=1)]
    kv: list[tuple[str, Value]] = [("d", list(d)), ("delta", deltas), ("window", window)]
    if verdict:
        report.append(f"verdict: {verdict} (finite-window heuristic, n <= {window})")
        report.append(f"log_estimate: {estimate}")
        kv += [("verdict", verdict), ("log_estimate", str(estimate)), ("heuristic", True)]
    else:
        report.append(f"aborted: span cap exceeded after n = {len(d)}")
        kv.append(("aborted", "span-cap"))
    return Outcome(code, kv, report)


def cmd_gk(args) -> Outcome:
    if (args.spec is None) == (args.gens is None):
        raise InputError("give exactly one of --spec and --gens")
    if args.nmax < 2:
        raise InputError("--nmax must be at least 2")
    gens = algebras.default_generators(_spec(args.spec)) if args.spec else _elements(args.gens)
    if len({g.n for g in gens}) != 1:
        raise InputError("generators have different sizes")
    try:
        prof = growth.gk_profile(gens, args.nmax, args.cap)
    except growth.SpanCapExceeded as exc:
        return _profile_outcome(exc.partial, "", None, args.nmax, EXIT_CAP)
    return _profile_outcome(prof.d, prof.verdict, prof.log_estimate, prof.window, EXIT_OK)


def cmd_iso(args) -> Outcome:
    p, q = _matrix(args.p), _matrix(args.q)
    v = isom.iso_test(p, q)
    kv: list[tuple[str, Value]] = [
        ("isomorphic", v.isomorphic),
        ("alpha", "none" if v.alpha is None else str(v.alpha)),
        ("canonical_p", [str(f) for f in v.canonical_p]),
        ("canonical_q", [str(f) for f in v.canonical_q]),
        ("reason", v.reason.value),
    ]
    return Outcome(EXIT_OK if v.isomorphic else EXIT_FALSE, kv)


def cmd_member(args) -> Outcome:
    spec = _spec(args.spec)
    e = _element(args.elem)
    res = algebras.membership(spec, e)
    kv: list[tuple[str, Value]] = [("member", res.member)]
    if res.member and spec.kind is algebras.Kind.CENDQ:
        kv.append(("witness", format_polymatrix(res.witness, "; ")))
    return Outcome(EXIT_OK if res.member else EXIT_FALSE, kv)


def cmd_unit(args) -> Outcome:
    e = _element(args.elem)
    if args.probes:
        probes = _elements(args.probes)
        basis = "file"
    else:
        probes = algebras.default_generators(algebras.cend(e.n))
        basis = "default-generators"
    ok = algebras.is_unit(e, probes)
    kv: list[tuple[str, Value]] = [("unit", ok), ("probes", len(probes)), ("certificate", basis)]
    return Outcome(EXIT_OK if ok else EXIT_FALSE, kv)


def cmd_idem(args) -> Outcome:
    e = _element(args.elem)
    ok = algebras.is_idempotent(e)
    kv: list[tuple[str, Value]] = [("idempotent", ok)]
    if args.spec:
        mem = algebras.membership(_spec(args.spec), e).member
        kv.append(("member", mem))
        ok = ok and mem
    return Outcome(EXIT_OK if ok else EXIT_FALSE, kv)


def cmd_snf(args) -> Outcome:
    a = _matrix(args.matrix)
    res = smith.smith_normal_form(a, args.cap)
    kv: list[tuple[str, Value]] = [
        ("invariant_factors", [str(f) for f in res.invariant_factors]),
        ("rank", res.rank),
        ("U", format_polymatrix(res.U, "; ")),
        ("S", format_polymatrix(res.S, "; ")),
        ("V", format_polymatrix(res.V, "; ")),
    ]
    return Outcome(EXIT_OK, kv)


def cmd_oracle(args) -> Outcome:
    results = sweeps.oracle_suite(args.seed, args.random, args.size, args.deg)
    kv: list[tuple[str, Value]] = []
    ok = True
    for r in results:
        kv += [(f"{r.name}.samples", r.samples), (f"{r.name}.checks", r.checks), (f"{r.name}.result", "pass" if r.ok else "fail")]
        if not r.ok:
            kv.append((f"{r.name}.witness", r.failure))
            ok = False
    kv.append(("result", "pass" if ok else "fail"))
    return Outcome(EXIT_OK if ok else EXIT_FALSE, kv)


# ---------------------------------------------------------------------------
# argument parsing


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--format", choices=("report", "kv"), default=d("report"), help="output style")
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized sweeps")
    p.add_argument("--deg", type=int, default=d(3), help="entry degree cap for random samples")
    p.add_argument("--size", type=int, default=d(2), help="matrix size cap for random samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="confalg", description="Exact computations in Cend_N and its subalgebras.")
    _add_globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _add_globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("product", parents=[common], help="n-products of two elements")
    p.add_argument("files", nargs="+", help="one file with two elements, or two files")
    p.add_argument("--n", type=int, help="product index (default: full table)")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("check", parents=[common], help="check a named identity")
    p.add_argument("identity", help=f"one of {', '.join(IDENTITIES)}")
    p.add_argument("files", nargs="*", help="element files (all tuples are checked)")
    p.add_argument("--random", type=int, default=100, help="number of random tuples when no files are given")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gk", parents=[common], help="growth profile d_n")
    p.add_argument("--spec", help='algebra spec, e.g. "cend 1"')
    p.add_argument("--gens", help="generator file")
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--cap", type=int, default=growth.DEFAULT_SPAN_CAP, help="span size cap")
    p.set_defaults(func=cmd_gk)

    p = sub.add_parser("iso", parents=[common], help="isomorphism test for Cend_{N,P} and Cend_{N,Q}")
    p.add_argument("p")
    p.add_argument("q")
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("member", parents=[common], help="algebra membership")
    p.add_argument("--spec", required=True)
    p.add_argument("--elem", required=True)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("unit", parents=[common], help="conformal unit test against probes")
    p.add_argument("--elem", required=True)
    p.add_argument("--probes", help="probe elements (default: generators of Cend_N)")
    p.set_defaults(func=cmd_unit)

    p = sub.add_parser("idem", parents=[common], help="conformal idempotent test")
    p.add_argument("--elem", required=True)
    p.add_argument("--spec", help="also test membership in this algebra")
    p.set_defaults(func=cmd_idem)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form of a polynomial matrix")
    p.add_argument("matrix")
    p.add_argument("--cap", type=int, default=smith.DEFAULT_DEGREE_CAP, help="intermediate degree cap")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("oracle", parents=[common], help="randomized oracle sweep")
    p.add_argument("--random", type=int, default=100, help="number of random pairs")
    p.set_defaults(func=cmd_oracle)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.size < 1 or args.deg < 0:
        err.write("error: --size must be positive and --deg non-negative\n")
        return EXIT_INVALID
    try:
        outcome = args.func(args)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (ParseError, ShapeError, UnknownIdentity, smith.SingularMatrixError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID
    except smith.SNFDegreeError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CAP
    out.write(format_kv(outcome.kv) if args.format == "kv" else _render_report(outcome))
    return outcome.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
