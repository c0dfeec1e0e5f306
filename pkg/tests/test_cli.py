from __future__ import annotations

import io
import subprocess
import sys

import pytest

from confalg.cli import format_kv, parse_kv, run


@pytest.fixture
def files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    content = {
        "x.ce": "N=1; [1,1]: x\n",
        "pair.ce": "N=1; [1,1]: x\n---\nN=1; [1,1]: 1\n",
        "bad.ce": "N=1\n[1,1]: x +* 2\n",
        "e.ce": "N=1; [1,1]: x - D\n",
        "one.ce": "N=1; [1,1]: 1\n",
        "id2.ce": "N=2; [1,1]: 1; [2,2]: 1\n",
        "e11.ce": "N=2; [1,1]: 1\n",
        "q.pm": "y\n",
        "q2.pm": "1, 0\n0, y\n",
        "p.pm": "x\n",
        "p3.pm": "x + 3\n",
        "psq.pm": "x^2\n",
        "sing.pm": "x, x\n1, 1\n",
        "jordan.pm": "t, 1\n0, t\n",
    }
    for name, text in content.items():
        (tmp_path / name).write_text(text)
    return tmp_path


def cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


class TestProduct:
    def test_examples(self, files):
        assert cli("product", "x.ce", "x.ce", "--n", "1") == (0, "x\n", "")
        assert cli("product", "x.ce", "x.ce", "--n", "7")[:2] == (0, "0\n")

    def test_table(self, files):
        code, out, _ = cli("product", "pair.ce", "--format", "kv")
        assert code == 0 and out == "locality=1\nproduct.0=x\n"

    def test_matrix_output(self, files):
        code, out, _ = cli("product", "id2.ce", "e11.ce", "--n", "0")
        assert out == "N=2\n[1,1]: 1\n"

    def test_parse_error(self, files):
        code, out, err = cli("product", "bad.ce", "x.ce", "--n", "0")
        assert code == 2 and out == ""
        assert "bad.ce:2:11" in err

    def test_missing_file_and_mismatch(self, files):
        assert cli("product", "nope.ce", "x.ce")[0] == 2
        assert cli("product", "x.ce", "id2.ce")[0] == 2
        assert cli("product", "x.ce")[0] == 2


class TestCheck:
    def test_random_pass(self, files):
        code, out, _ = cli("check", "conf-ass", "--random", "100", "--seed", "7", "--size", "2", "--deg", "3")
        assert code == 0 and "result: pass" in out

    def test_c3(self, files):
        assert cli("check", "C3", "--random", "50", "--seed", "1")[0] == 0

    def test_commutativity_fails_with_witness(self, files):
        code, out, _ = cli("check", "commutativity", "pair.ce", "--format", "kv")
        kv = dict(parse_kv(out))
        assert code == 1 and kv["result"] == "fail" and "MISMATCH" in kv["witness"]

    def test_unknown_tag(self, files):
        code, _, err = cli("check", "jacobi")
        assert code == 2 and "unknown identity" in err


class TestGrowth:
    def test_current(self, files):
        code, out, _ = cli("gk", "--spec", "curr 2", "--nmax", "6")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "n d_n delta"
        assert lines[1:7] == ["1 4 4", "2 4 0", "3 4 0", "4 4 0", "5 4 0", "6 4 0"]
        assert lines[7].startswith("verdict: finite") and "heuristic" in lines[7]

    def test_cend1_kv(self, files):
        code, out, _ = cli("gk", "--spec", "cend 1", "--nmax", "8", "--format", "kv")
        kv = dict(parse_kv(out))
        assert kv["d"].split(",") == [str(n + 1) for n in range(1, 9)]
        assert kv["verdict"] == "linear" and kv["window"] == "8" and kv["heuristic"] == "true"

    def test_user_generators(self, files):
        code, out, _ = cli("gk", "--gens", "pair.ce", "--nmax", "4", "--format", "kv")
        assert code == 0 and dict(parse_kv(out))["d"] == "2,3,4,5"

    def test_cendq(self, files):
        code, out, _ = cli("gk", "--spec", "cendq 1 q.pm", "--nmax", "6", "--format", "kv")
        assert dict(parse_kv(out))["verdict"] == "linear"

    def test_cap(self, files):
        code, out, _ = cli("gk", "--spec", "cend 2", "--nmax", "6", "--cap", "12")
        assert code == 3 and out.startswith("n d_n delta\n1 5 5\n") and "aborted" in out

    def test_bad_input(self, files):
        assert cli("gk", "--nmax", "3")[0] == 2
        assert cli("gk", "--spec", "cend x")[0] == 2
        assert cli("gk", "--spec", "cend 1", "--nmax", "1")[0] == 2


class TestIso:
    def test_isomorphic(self, files):
        code, out, _ = cli("iso", "p.pm", "p3.pm", "--format", "kv")
        assert code == 0
        assert out == "isomorphic=true\nalpha=-3\ncanonical_p=x\ncanonical_q=x + 3\nreason=match\n"

    def test_not_isomorphic(self, files):
        code, out, _ = cli("iso", "p.pm", "psq.pm")
        assert code == 1 and "reason: degree-mismatch" in out

    def test_singular(self, files):
        assert cli("iso", "p.pm", "sing.pm")[0] == 2


class TestThinWrappers:
    def test_member(self, files):
        code, out, _ = cli("member", "--spec", "cendq 1 q.pm", "--elem", "e.ce")
        assert code == 0 and out.startswith("member: true")
        assert cli("member", "--spec", "cendq 1 q.pm", "--elem", "one.ce")[:2] == (1, "member: false\n")
        assert cli("member", "--spec", "cendq 2 q2.pm", "--elem", "x.ce")[0] == 2

    def test_unit_and_idem(self, files):
        assert cli("idem", "--elem", "id2.ce") == (0, "idempotent: true\n", "")
        code, out, _ = cli("idem", "--elem", "e11.ce", "--spec", "cendq 2 q2.pm", "--format", "kv")
        assert code == 0 and out == "idempotent=true\nmember=true\n"
        assert cli("idem", "--elem", "x.ce")[0] == 1
        assert cli("unit", "--elem", "id2.ce")[0] == 0
        assert cli("unit", "--elem", "x.ce", "--probes", "x.ce")[0] == 1

    def test_snf(self, files):
        code, out, _ = cli("snf", "jordan.pm", "--format", "kv")
        kv = dict(parse_kv(out))
        assert code == 0 and kv["invariant_factors"] == "1,t^2" and kv["rank"] == "2"
        assert cli("snf", "jordan.pm", "--cap", "0")[0] == 3

    def test_oracle(self, files):
        code, out, _ = cli("oracle", "--random", "30", "--seed", "42", "--format", "kv")
        assert code == 0 and out.endswith("result=pass\n")


class TestContracts:
    COMMANDS = [
        ("product", "pair.ce"),
        ("check", "conf-ass1", "--random", "20", "--seed", "5"),
        ("gk", "--spec", "cendq 1 q.pm", "--nmax", "4"),
        ("iso", "p.pm", "p3.pm"),
        ("member", "--spec", "cendq 1 q.pm", "--elem", "e.ce"),
        ("unit", "--elem", "id2.ce"),
        ("idem", "--elem", "id2.ce"),
        ("snf", "jordan.pm"),
        ("oracle", "--random", "10", "--seed", "3"),
    ]

    @pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
    @pytest.mark.parametrize("fmt", ["report", "kv"])
    def test_deterministic(self, files, argv, fmt):
        runs = {cli(*argv, "--format", fmt) for _ in range(3)}
        assert len(runs) == 1

    @pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
    def test_kv_round_trip(self, files, argv):
        _, out, _ = cli(*argv, "--format", "kv")
        pairs = parse_kv(out)
        assert format_kv(pairs) == out
        assert parse_kv(format_kv(pairs)) == pairs

    def test_list_values(self):
        text = format_kv([("d", [1, 2, 3]), ("ok", True), ("name", "x + 1")])
        assert text == "d=1,2,3\nok=true\nname=x + 1\n"

    def test_global_flags_before_command(self, files):
        assert cli("--format", "kv", "iso", "p.pm", "p3.pm")[1].startswith("isomorphic=true")

    def test_bad_global(self, files):
        assert cli("--size", "0", "oracle")[0] == 2
        assert cli("frobnicate")[0] == 2

    def test_module_entry_point(self, files):
        proc = subprocess.run(
            [sys.executable, "-m", "confalg", "product", "x.ce", "x.ce", "--n", "0"],
            capture_output=True,
            text=True,
            cwd=files,
        )
        assert proc.returncode == 0 and proc.stdout == "x^2\n"
