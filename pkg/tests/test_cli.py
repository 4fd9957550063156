import json
import subprocess
import sys

import numpy as np
import pytest

from qudit_teleport.cli import main
from qudit_teleport.register import random_state, save_state


def run_cli(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, "--out", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_run_random(tmp_path):
    code, report = run_cli(tmp_path, "run", "--d", "2", "--m", "1", "--n", "1", "--state", "random", "--seed", "1")
    assert code == 0
    assert report["mode"] == "sampled"
    assert report["branches"][0]["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert report["seed"] == 1


def test_bad_dimension(tmp_path, capsys):
    code, report = run_cli(tmp_path, "run", "--d", "1", "--m", "1", "--n", "1")
    assert code == 2
    assert report is None
    assert "d must be ≥ 2" in capsys.readouterr().err


def test_cap_exceeded(tmp_path):
    code, _ = run_cli(tmp_path, "run", "--d", "5", "--m", "3", "--n", "4")
    assert code == 3


def test_branch_cap_exceeded(tmp_path):
    code, _ = run_cli(tmp_path, "verify", "--d", "2", "--m", "1", "--n", "1", "--branch-cap", "4")
    assert code == 3


def test_verify_random(tmp_path):
    code, report = run_cli(tmp_path, "verify", "--d", "3", "--m", "1", "--n", "2", "--state", "random")
    assert code == 0
    assert report["aggregate"]["num_branches"] == 81


def test_verify_plain_basis(tmp_path):
    code, report = run_cli(tmp_path, "verify", "--d", "2", "--m", "1", "--n", "0", "--state", "basis:0")
    assert code == 0
    assert len(report["branches"]) == 4


def test_verify_corrupted(tmp_path):
    code, report = run_cli(tmp_path, "verify", "--d", "2", "--m", "1", "--n", "1", "--corrupt-correction")
    assert code == 4
    assert report["aggregate"]["min_fidelity"] < 1 - 1e-6


def test_state_file(tmp_path):
    path = tmp_path / "phi.json"
    save_state(random_state(3, ["x1", "x2"], np.random.default_rng(0)), path)
    code, report = run_cli(tmp_path, "run", "--d", "3", "--m", "2", "--n", "1", "--state", str(path))
    assert code == 0


def test_state_file_wrong_shape(tmp_path):
    path = tmp_path / "phi.json"
    save_state(random_state(3, ["x1"], np.random.default_rng(0)), path)
    code, _ = run_cli(tmp_path, "run", "--d", "3", "--m", "2", "--n", "1", "--state", str(path))
    assert code == 2


def test_state_file_not_normalized(tmp_path):
    path = tmp_path / "phi.json"
    path.write_text(json.dumps({"d": 2, "labels": ["x1"], "amplitudes": [[1, 0], [1, 0]]}))
    code, _ = run_cli(tmp_path, "run", "--d", "2", "--m", "1", "--n", "1", "--state", str(path))
    assert code == 2


@pytest.mark.parametrize("state", ["ghz-like", "basis:12", "basis:1,2"])
def test_builtin_states(tmp_path, state):
    code, _ = run_cli(tmp_path, "verify", "--d", "3", "--m", "2", "--n", "0", "--state", state)
    assert code == 0


def test_bad_basis_digits(tmp_path):
    code, _ = run_cli(tmp_path, "run", "--d", "2", "--m", "2", "--n", "0", "--state", "basis:0")
    assert code == 2


def test_decoy(tmp_path):
    code, report = run_cli(tmp_path, "decoy", "--d", "2", "--count", "100000", "--eve", "intercept-resend",
                           "--seed", "7")
    assert code == 0
    assert abs(report["rate"] - 0.25) <= 4 * np.sqrt(0.25 * 0.75 / 100000)
    code, report = run_cli(tmp_path, "decoy", "--count", "1000", "--eve", "none")
    assert code == 0 and report["rate"] == 0


def test_decoy_needs_count(tmp_path):
    code, _ = run_cli(tmp_path, "decoy", "--d", "2", "--count", "0")
    assert code == 2


def test_unknown_eve_rejected():
    with pytest.raises(SystemExit) as exc:
        main(["decoy", "--count", "5", "--eve", "pns"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "qudit_teleport", "run", "--d", "2", "--m", "1", "--n", "0", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["aggregate"]["min_fidelity"] == pytest.approx(1.0)
