import json

import numpy as np
import pytest

from ahlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_verify_flat_torus_passes(capsys):
    code, out = run(capsys, "verify", "--structure", "flat-torus", "--points", "3")
    assert code == 0
    report = json.loads(out)
    assert report["summary"]["failed"] == 0
    assert report["summary"]["total"] == report["summary"]["passed"]
    assert report["summary"]["total"] == len(report["records"])


@pytest.mark.parametrize("structure", ("kodaira-thurston", "hopf-surface"))
def test_verify_setting_suites_pass(capsys, structure):
    code, out = run(capsys, "verify", "--structure", structure, "--points", "3")
    assert code == 0
    report = json.loads(out)
    checks = {r["check"] for r in report["records"]}
    if structure == "kodaira-thurston":
        assert "ak_scalar" in checks  # s' + 2R + |DJ|^2 = 0
    else:
        assert "hermitian_dj" in checks


def test_verify_exit_codes(capsys):
    assert run(capsys, "verify", "--structure", "nope")[0] == 2
    assert run(capsys, "verify", "--points", "0")[0] == 2
    assert run(capsys, "verify", "--tol-analytic", "-1")[0] == 2


def test_tensors_command(capsys):
    code, out = run(capsys, "tensors", "--structure", "kodaira-thurston",
                    "--point", "0", "0", "0", "0")
    assert code == 0
    rep = json.loads(out)
    assert rep["scalar"]["E1"] > 0
    assert rep["theta"] == [0.0, 0.0, 0.0, 0.0]
    code, out = run(capsys, "tensors", "--structure", "hopf-surface",
                    "--point", "1", "0.2", "0", "0.1")
    rep = json.loads(out)
    assert max(abs(v) for v in rep["theta"]) > 0.1
    assert code == 0


def test_tensors_rejects_bad_point(capsys):
    code, _ = run(capsys, "tensors", "--structure", "hopf-surface",
                  "--point", "0", "0", "0", "0")
    assert code == 2


def test_symbol_command(capsys):
    code, out = run(capsys, "symbol", "--points", "5", "--seed", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] is True
    assert rep["max_residual"] < 1e-10


def test_flow_command_and_determinism(tmp_path, capsys):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["flow", "--structure", "kodaira-thurston", "--flow", "SCF",
            "--t-end", "0.01", "--dt", "0.002"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    lines1 = out1.read_text().splitlines()
    lines2 = out2.read_text().splitlines()
    # trajectory lines are byte-identical; only the config echo of the
    # output path differs
    assert lines1[:-1] == lines2[:-1]
    first = json.loads(lines1[0])
    assert first["t"] == 0.0
    assert np.asarray(first["G"]).shape == (4, 4)
    last = json.loads(lines1[-2])
    assert last["monitors"]["domega"] < 1e-10


def test_flow_monitor_breach_exits_1(tmp_path):
    out = tmp_path / "t.jsonl"
    code = main(["flow", "--structure", "kodaira-thurston", "--flow", "SCF",
                 "--t-end", "0.5", "--dt", "0.05", "--tol-fd", "1e-16",
                 "--out", str(out)])
    assert code == 1


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"structure": "flat-torus", "points": 2}))
    code, out = run(capsys, "verify", "--config", str(cfg), "--points", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["structure"] == "flat-torus"
    assert rep["config"]["points"] == 1  # flag wins


def test_seventeen_digit_serialization(capsys):
    code, out = run(capsys, "tensors", "--structure", "kodaira-thurston",
                    "--point", "0.1", "0.2", "0.3", "0.4")
    assert code == 0
    rep = json.loads(out)
    g = np.asarray(rep["g"])
    direct = __import__("ahlab.structures", fromlist=["builtin"]).builtin(
        "kodaira-thurston").jet_at(np.array([0.1, 0.2, 0.3, 0.4])).g
    assert np.array_equal(g, direct)  # round-trips exactly


def test_text_format(capsys):
    code, out = run(capsys, "verify", "--structure", "flat-torus",
                    "--points", "1", "--format", "text")
    assert code == 0
    assert "summary" in out and "{" not in out.splitlines()[0]
