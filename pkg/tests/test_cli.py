"""End-to-end checks of the command-line interface."""

import json
import subprocess
import sys

import pytest

from sirlock import cli


def run_cli(*argv):
    return cli.main(list(argv))


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# experiment setup\n"
        "kappa = 7300  # inline comment\n"
        "horizon-days = 1095\n"
        "kappa-grid = 3650, 7300\n"
        "output_dir = out\n"
        "\n"
    )
    d = cli.parse_config_file(str(path))
    assert d["kappa"] == 7300.0
    assert d["horizon_days"] == 1095.0
    assert d["kappa_grid"] == [3650.0, 7300.0]
    assert d["output_dir"] == "out"


def test_config_file_rejects_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("lockdown_strength = 3\n")
    with pytest.raises(cli.ConfigError):
        cli.parse_config_file(str(path))


def test_config_file_rejects_bad_number(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("kappa = many\n")
    with pytest.raises(cli.ConfigError):
        cli.parse_config_file(str(path))


def test_flags_override_config(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("kappa = 7300\nhorizon-days = 1095\n")
    parser = cli.make_parser()
    args = parser.parse_args(
        ["simulate", "--config", str(cfg_file), "--kappa", "3650"]
    )
    cfg = cli.build_config(args)
    assert cfg.kappa == 3650.0  # flag wins
    assert cfg.horizon_days == 1095.0  # file survives where no flag given


def test_invalid_parameters_exit_code(tmp_path):
    code = run_cli("simulate", "--s0", "0.5", "--i0", "0.6", "--r0", "-0.1",
                   "--output-dir", str(tmp_path))
    assert code == 1


def test_missing_policy_argument_exit_code(tmp_path):
    code = run_cli("simulate", "--policy", "a", "--output-dir", str(tmp_path))
    assert code == 1


def test_numerical_failure_exit_code(tmp_path):
    # start past herd immunity: the bound's premise fails
    code = run_cli("lower-bound", "--s0", "0.2", "--i0", "0.01", "--r0", "0.79",
                   "--output-dir", str(tmp_path))
    assert code == 2


def test_simulate_uncontrolled(tmp_path):
    code = run_cli("simulate", "--horizon-days", "200",
                   "--output-dir", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "trajectory.csv").read_text().strip().splitlines()
    assert rows[0].startswith("t,s,i,r,L")
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["cost"]["economic"] == 0.0
    assert summary["final_state"]["t"] == 200.0


def test_policy_commands_write_outputs(tmp_path):
    assert run_cli("policy-a", "--rho", "1.2", "--horizon-days", "730",
                   "--output-dir", str(tmp_path)) == 0
    run = json.loads((tmp_path / "policy_a_summary.json").read_text())
    assert run["parameter"] == 1.2

    assert run_cli("policy-b", "--iota", "0.06", "--horizon-days", "730",
                   "--output-dir", str(tmp_path)) == 0
    run = json.loads((tmp_path / "policy_b_summary.json").read_text())
    assert {ph["phase"] for ph in run["phase_times"]} >= {"I", "II"}


def test_simulate_from_control_file(tmp_path):
    from sirlock import PiecewiseConstantControl

    ctl_path = tmp_path / "ctl.csv"
    PiecewiseConstantControl([0.0, 50.0, 150.0], [0.5, 0.1]).to_csv(ctl_path)
    code = run_cli("simulate", "--policy", "file", "--control-file", str(ctl_path),
                   "--horizon-days", "200", "--output-dir", str(tmp_path))
    assert code == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    # 0.5*50 + 0.1*100 days of lockdown
    assert summary["cost"]["economic"] == pytest.approx(35.0, rel=1e-9)


def test_optimize_commands(tmp_path):
    assert run_cli("optimize-rho", "--output-dir", str(tmp_path)) == 0
    d = json.loads((tmp_path / "optimize_rho.json").read_text())
    assert d["rho_star"] > 1.0

    assert run_cli("optimize-iota", "--output-dir", str(tmp_path)) == 0
    d = json.loads((tmp_path / "optimize_iota.json").read_text())
    assert 0.0 < d["iota_star"] < 1.0


def test_lower_bound_command(tmp_path):
    assert run_cli("lower-bound", "--output-dir", str(tmp_path)) == 0
    d = json.loads((tmp_path / "lower_bound.json").read_text())
    assert d["c_star"] == pytest.approx(213.062195, rel=1e-5)


def test_optimal_control_command(tmp_path):
    code = run_cli("optimal-control", "--horizon-days", "365",
                   "--n-intervals", "60", "--output-dir", str(tmp_path))
    assert code == 0
    d = json.loads((tmp_path / "oc_summary.json").read_text())
    assert d["converged"] is True
    assert (tmp_path / "oc_control.csv").exists()
    assert (tmp_path / "oc_trajectory.csv").exists()


def test_sweep_command(tmp_path):
    code = run_cli("sweep", "--axis", "kappa", "--kappa-grid", "3650,14600",
                   "--horizon-days", "547.5", "--n-intervals", "60",
                   "--output-dir", str(tmp_path))
    assert code == 0
    rows = (tmp_path / "sweep_kappa.csv").read_text().strip().splitlines()
    assert rows[0] == "axis_value,econ_loss,deaths,regime,total_cost,converged"
    assert len(rows) == 3
    first = rows[1].split(",")
    assert float(first[0]) == 3650.0
    assert first[3] in ("mitigation", "suppression")


def test_figures_emit_rho_curve(tmp_path):
    code = run_cli("figures", "1", "--horizon-days", "730", "--gnuplot",
                   "--output-dir", str(tmp_path))
    assert code == 0
    assert (tmp_path / "fig1_dynamics.csv").exists()
    curve = (tmp_path / "fig1_cost_vs_rho.csv").read_text().strip().splitlines()
    assert curve[0] == "rho,cost"
    assert len(curve) > 50
    assert (tmp_path / "fig1.gp").exists()


def test_installed_entry_point():
    out = subprocess.run([sys.executable, "-m", "sirlock.cli", "--help"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "simulate" in out.stdout and "lower-bound" in out.stdout
