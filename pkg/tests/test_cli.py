import json
import subprocess
import sys
from pathlib import Path

import pytest

from rihull.cli import main
from rihull.core import StepFunction

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_rearrange_tables(capsys):
    code, out, _ = run(capsys, "rearrange", "--scenario", str(SCENARIOS / "two_piece.json"))
    assert code == 0
    f = json.loads(out)["functions"]["f"]
    assert set(f) == {"mu_f", "kappa_f", "f_star", "f_lowstar"}
    assert f["f_star"] == {"domain": ["0", "1"], "breaks": ["1/2"], "values": ["3", "1"]}
    assert StepFunction.from_dict(f["kappa_f"]).values[-1] == 1


@pytest.mark.parametrize("cmd", ["norms", "ryff", "embed", "hull", "bp"])
def test_subcommands_pass(capsys, cmd):
    code, out, _ = run(capsys, cmd, "--scenario", str(SCENARIOS / "two_piece.json"))
    assert code == 0
    assert all(a["ok"] for a in json.loads(out).get("assertions", []))


def test_power_weight_scenario(capsys):
    code, out, _ = run(capsys, "bp", "--scenario", str(SCENARIOS / "power_weight.json"))
    report = json.loads(out)
    assert code == 0 and report["bp"]["C"] == "3" and report["lorentz"]["ok"]


def test_malformed_rational(capsys):
    code, _, err = run(capsys, "rearrange", "--scenario", str(SCENARIOS / "bad_rational.json"))
    assert code == 2 and "functions.f.values[1]" in err


def test_json_syntax_error_has_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "p": "2",\n  oops\n}')
    code, _, err = run(capsys, "norms", "--scenario", str(bad))
    assert code == 2 and ":3:" in err


def test_assertion_failure_exit(monkeypatch, capsys):
    from rihull import cli
    from rihull.inequalities import InequalityReport

    monkeypatch.setattr(cli, "hull_lower_bound", lambda f, inst: InequalityReport(1, 0, False, 1))
    code, out, err = run(capsys, "hull", "--scenario", str(SCENARIOS / "two_piece.json"))
    report = json.loads(out)
    assert code == 1 and "f: lower bound" in err
    assert report["failed"] == "f: lower bound" and report["lower_bound"]["f"]["lambda_pow"] == "1"


def test_deterministic_and_round_trip(capsys):
    args = ("hull", "--scenario", str(SCENARIOS / "half_line.json"))
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    witness = json.loads(first)["witness"]["f"]
    assert StepFunction.from_dict(witness).to_dict() == witness


def test_verify_small_campaign(capsys):
    code, out, _ = run(capsys, "verify", "--seed", "42", "--cases", "50")
    assert code == 0 and json.loads(out)["ok"]


def test_csv_tables(tmp_path, capsys):
    code, _, _ = run(capsys, "rearrange", "--scenario", str(SCENARIOS / "two_piece.json"), "--csv", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "functions.f.f_star.csv").read_text().splitlines()
    assert rows == ["lo,hi,value", "0,1/2,3", "1/2,1,1"]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rihull", "norms", "--scenario", str(SCENARIOS / "two_piece.json"), "--p", "3"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["functions"]["f"]["lp_pow"] == "55/2"
