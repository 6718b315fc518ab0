import io
import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from rslab.main import cli
from rslab.schemas.reports import parse_report
from rslab.services.tap_construction import load_tap_state

@pytest.fixture
def runner():
    return CliRunner()

def test_solve_q(runner):
    result = runner.invoke(cli, ["solve-q", "--beta", "0", "--h", "0.7"])
    assert result.exit_code == 0, result.output
    report = parse_report(result.stdout)
    assert report.q == np.tanh(0.7) ** 2
    assert f"q={np.tanh(0.7) ** 2:.12g}" in result.stderr

def test_summary_goes_to_stdout_with_out(runner, tmp_path):
    out = tmp_path / "q.json"
    result = runner.invoke(cli, ["solve-q", "--beta", "0.5", "--h", "0.4", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("q=")
    assert parse_report(out.read_text()).params.beta == 0.5

def test_phase_scan_csv(runner):
    result = runner.invoke(cli, ["phase-scan", "--h-grid", "0.2,0.7", "--format", "csv",
                                 "--quad-order", "61"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert len(frame) == 2
    assert (frame["beta_tech"] <= frame["beta_at"] + 1e-10).all()

def test_free_energy_is_byte_identical(runner, tmp_path):
    outputs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        result = runner.invoke(cli, ["free-energy", "--beta", "0.8", "--h", "0.3", "--N", "8",
                                     "--samples", "10", "--seed", "7", "--out", str(path)])
        assert result.exit_code == 0, result.output
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert json.loads(outputs[0])["schema_version"] == "1.0"

def test_se_table_csv(runner):
    result = runner.invoke(cli, ["se-table", "--beta", "0.5", "--h", "0.4", "--k", "5", "--format", "csv"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert list(frame.columns) == ["k", "alpha", "gamma", "gamma2cum"]
    assert frame["k"].tolist() == [1, 2, 3, 4, 5]

def test_tap_run_with_dump(runner, tmp_path):
    dump = tmp_path / "state.bin"
    result = runner.invoke(cli, ["tap-run", "--beta", "0.5", "--h", "0.4", "--N", "40", "--k", "3",
                                 "--seed", "3", "--dump", str(dump)])
    assert result.exit_code == 0, result.output
    report = parse_report(result.stdout)
    assert report.orthonormality_error < 1e-9
    state = load_tap_state(dump)
    assert state.N == 40 and state.k == 3

def test_moments_and_decomposition(runner):
    result = runner.invoke(cli, ["moments", "--beta", "0.5", "--h", "0.4", "--N", "10", "--k", "2",
                                 "--epsilon", "0.6"])
    assert result.exit_code == 0, result.output
    report = parse_report(result.stdout)
    assert report.log_second_moment_per_N >= 2 * report.log_first_moment_per_N - 1e-12

    result = runner.invoke(cli, ["decomp-check", "--beta", "0.5", "--h", "0.4", "--N", "30", "--k", "2"])
    assert result.exit_code == 0, result.output
    assert parse_report(result.stdout).residual <= 1e-9

def test_lower_bound_csv(runner):
    result = runner.invoke(cli, ["lower-bound", "--beta", "0.5", "--h", "0.4", "--N", "10", "--k", "2",
                                 "--epsilon", "0.6", "--samples", "2", "--format", "csv"])
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(io.StringIO(result.stdout))
    assert len(frame) == 2
    assert (frame["f_N"] >= frame["rhs_tight"] - 1e-9).all()

def test_config_file(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"command": "solve-q", "beta": 0.5, "h": 0.4}))
    result = runner.invoke(cli, ["solve-q", "--config", str(config)])
    assert result.exit_code == 0, result.output

    # Repeating a value is allowed; contradicting it is not
    result = runner.invoke(cli, ["solve-q", "--config", str(config), "--beta", "0.5"])
    assert result.exit_code == 0, result.output
    result = runner.invoke(cli, ["solve-q", "--config", str(config), "--beta", "0.6"])
    assert result.exit_code == 2
    assert "conflicts" in result.output

def test_config_for_another_command(runner, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"command": "tap-run", "beta": 0.5, "h": 0.4}))
    result = runner.invoke(cli, ["solve-q", "--config", str(config)])
    assert result.exit_code == 2

@pytest.mark.parametrize("args", [
    ["solve-q", "--beta", "0.5"],
    ["solve-q", "--beta", "-1", "--h", "0.2"],
    ["solve-q", "--beta", "0.5", "--h", "0.2", "--format", "csv"],
    ["tap-run", "--beta", "0.5", "--h", "0.2", "--N", "5", "--k", "5"],
])
def test_usage_errors(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2, result.output

def test_capability_error_exit_code(runner):
    result = runner.invoke(cli, ["free-energy", "--beta", "0.5", "--h", "0.1", "--N", "30",
                                 "--samples", "2"])
    assert result.exit_code == 3
    assert "CapabilityError" in result.output
