from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from doflab.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_demo():
    code, out, err = run("demo", "gmk", "--seed", "7", "--pretty")
    assert code == 0
    rec = json.loads(out)["trials"][0]
    assert rec["info"]["sizes"] == {"11": 2, "12": 1, "21": 1, "22": 2}
    assert rec["info"]["n"] == 5 and rec["info"]["sum_dof"] == "6/5"
    assert all(c["status"] == "pass" for c in rec["checks"].values())
    assert "sum-DoF 6/5" in err and "FAIL" not in err


def test_verify_ratio_witness():
    code, out, _ = run("verify", "--scheme", "ratio-witness", "--seed", "1")
    assert code == 0
    c = json.loads(out)["trials"][0]["checks"]["lemma1.pair12"]
    assert (c["lhs"], c["rhs"], c["status"]) == (3, 2, "pass")


def test_verify_negative_control():
    code, out, _ = run("verify", "--scheme", "icsit-repeat", "--seed", "1")
    assert code == 0
    checks = json.loads(out)["trials"][0]["checks"]
    assert checks["causality"]["status"] == "expected-fail" and not checks["causality"]["holds"]
    c = checks["lemma1.pair12"]
    assert (c["lhs"], c["rhs"], c["status"]) == (2, 1, "hypothesis-violated")


def test_verify_static_file_with_finding(tmp_path):
    # claims decodability but V11 has rank 1 < m11 = 2
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"n": 2, "sizes": {"11": 2, "12": 0, "21": 0, "22": 0},
                             "rows": {"11": [["1", "1"], ["2", "2"]]}}))
    code, out, _ = run("verify", "--scheme", str(p), "--seed", "0")
    assert code == 1
    assert json.loads(out)["aggregates"]["failures"]["condi1"]


def test_usage_errors(tmp_path):
    assert run("verify", "--scheme", "nope")[0] == 2
    assert run("verify", "--scheme", "gmk", "--n", "4")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("demo", "gmk", "--bogus")[0] == 2
    assert run("replay", "--log", str(tmp_path / "missing.json"), "--trial", "0")[0] == 2
    junk = tmp_path / "junk.json"
    junk.write_text("not json")
    code, _, err = run("replay", "--log", str(junk), "--trial", "0")
    assert code == 2 and "error" in err
    assert run("ratio", "--scheme", "gmk", "--trials", "0")[0] == 2


def test_deterministic_bytes():
    a = run("search", "--trials", "15", "--seed", "3")
    b = run("search", "--trials", "15", "--seed", "3")
    assert a == b and a[0] == 0


def test_ratio_and_csv(tmp_path):
    code, out, _ = run("ratio", "--scheme", "ratio-witness", "--trials", "3", "--format", "csv",
                       "--out", str(tmp_path / "log.csv"))
    assert code == 0
    assert out.splitlines()[0] == "trial,seed,check,holds,lhs,rhs,status"
    assert (tmp_path / "log.csv").read_text() == out


def test_ic3_command():
    code, out, _ = run("ic3", "--trials", "10", "--seed", "2", "--n", "6", "--m", "2")
    assert code == 0
    d = json.loads(out)
    assert d["config"]["n"] == 6 and d["config"]["m"] == 2


def test_replay_round_trip(tmp_path):
    log = tmp_path / "log.json"
    code, _, _ = run("search", "--trials", "6", "--seed", "5", "--complexity", "1", "--out", str(log))
    assert code == 0
    code, out, _ = run("replay", "--log", str(log), "--trial", "4")
    assert code == 0
    d = json.loads(out)
    assert d["replay"]["matches"] is True
    assert d["trial"] == json.loads(log.read_text())["trials"][4]


def test_replay_adversarial(tmp_path):
    from doflab.harness import ExperimentConfig, run_experiment
    log = tmp_path / "adv.json"
    run_experiment(ExperimentConfig(scheme="lemma6-probe", trials=2, tamper="lemma6-adversary", output=str(log)))
    code, out, _ = run("replay", "--log", str(log), "--trial", "1")
    assert code == 1
    assert json.loads(out)["trial"]["checks"]["lemma6.count"]["lhs"] == 1


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "doflab", "demo", "gmk", "--seed", "7"], capture_output=True, text=True)
    assert p.returncode == 0
    assert p.stderr == ""
    assert json.loads(p.stdout)["aggregates"]["findings"] == 0
