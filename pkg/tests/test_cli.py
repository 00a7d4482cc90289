import io
import json
import subprocess
import sys

import pytest

from confalg.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def small(monkeypatch):
    monkeypatch.setenv("CONFALG_DIM", "12")
    monkeypatch.setenv("CONFALG_PHOTONS", "2")
    monkeypatch.setenv("CONFALG_GRID", "256")


def test_comm():
    assert run("comm", "E", "D", "--algebra", "conf2d")[:2] == (0, "E\n")
    assert run("comm", "E", "U", "--algebra", "conf2d")[:2] == (0, "1\n")
    assert run("comm", "P0", "X0", "--algebra", "conf2d-pair")[:2] == (0, "-1\n")


def test_normalize():
    code, out, _ = run("normalize", "inv(E)*E*D", "--algebra", "conf2d")
    assert (code, out) == (0, "D\n")


@pytest.mark.parametrize(
    "argv",
    [
        ("comm", "E", "Foo", "--algebra", "conf2d"),
        ("comm", "E", "D"),
        ("normalize", "E +", "--algebra", "conf2d"),
        ("verify",),
        ("verify", "--all", "--id", "shift.U.E"),
        ("verify", "--id", "no.such.record"),
        ("verify", "--all", "--tag", "no-such-tag"),
        ("repcheck", "--hbar", "-1"),
        ("repcheck", "--dim", "4"),
        ("frobnicate",),
    ],
)
def test_usage_errors(argv):
    code, _, _ = run(*argv)
    assert code == 2


def test_parse_error_message():
    code, _, err = run("normalize", "E + * D", "--algebra", "conf2d")
    assert code == 2
    assert "position 4" in err


def test_verify_one():
    code, out, _ = run("verify", "--id", "shift.U.E")
    assert code == 0
    assert out.startswith("PASS")


def test_verify_json_deterministic():
    a = run("verify", "--all", "--algebra", "conf2d", "--skip-numerical", "--format", "json")
    b = run("verify", "--all", "--algebra", "conf2d", "--skip-numerical", "--format", "json")
    assert a == b
    doc = json.loads(a[1])
    assert doc["summary"]["status"] == "PASS"
    assert doc["summary"]["counts"]["SKIPPED"] == 5


def test_verify_runs_numerical_records(small):
    code, out, _ = run("verify", "--all", "--tag", "casimir", "--format", "json")
    assert code == 0
    entries = {e["id"]: e for e in json.loads(out)["entries"]}
    assert entries["casimir.bound.basis"]["status"] == "PASS"


def test_env_defaults_and_flag_override(small):
    code, out, _ = run("repcheck", "--format", "json", "--seed", "5")
    assert code == 0
    cfg = json.loads(out)["config"]
    assert (cfg["dim"], cfg["photons"], cfg["grid"], cfg["seed"]) == (12, 2, 256, 5)
    code, out, _ = run("repcheck", "--format", "json", "--dim", "14", "--seed", "5")
    assert json.loads(out)["config"]["dim"] == 14


def test_bad_env_is_usage_error(monkeypatch):
    monkeypatch.setenv("CONFALG_DIM", "many")
    assert run("repcheck")[0] == 2


def test_report_out(small, tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert run("report", "--out", str(p1))[0] == 0
    assert run("report", "--out", str(p2))[0] == 0
    assert p1.read_bytes() == p2.read_bytes()
    doc = json.loads(p1.read_text())
    assert [r["kind"] for r in doc["reports"]] == ["symbolic", "numerical"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "confalg", "comm", "D", "C", "--algebra", "conf2d"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "C\n"
