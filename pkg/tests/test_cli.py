import csv
import json
import os

import pytest

from mgmarket.cli import dispatch


def run_cli(*argv):
    return dispatch(list(argv))


SMALL = ["--n-agents", "31", "--horizon", "50", "--runs", "2", "--seed", "7", "--threads", "1"]


def test_simulate_happy_path(tmp_path):
    out = tmp_path / "traj.csv"
    summary = tmp_path / "summary.json"
    outcome = run_cli("simulate", *SMALL, "--b1", "0.5", "--b2", "0.5",
                      "--out", str(out), "--summary", str(summary))
    assert outcome.exit_code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "P1", "r1", "A1", "re1_mean", "P2", "r2", "A2", "re2_mean"]
    assert len(rows) == 51
    record = json.loads(summary.read_text())
    assert record["config"]["b1"] == 0.5
    assert len(record["runs"]) == 2
    assert record["metadata"]["expectation_series"] == "population_mean"


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_cli("simulate", *SMALL, "--b1", "0.3", "--b2", "0.3", "--out", str(a))
    run_cli("simulate", *SMALL, "--b1", "0.3", "--b2", "0.3", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "base.cfg"
    cfg.write_text(
        "n_agents = 31\nhorizon = 50\nn_runs = 2\nmaster_seed = 7\n"
        "coupling = homogeneous\nb1 = 0.1\nb2 = 0.1\n"
    )
    out1, out2 = tmp_path / "o1.csv", tmp_path / "o2.csv"
    assert run_cli("simulate", "--config", str(cfg), "--threads", "1",
                   "--out", str(out1)).exit_code == 0
    # flag wins over the file value
    assert run_cli("simulate", "--config", str(cfg), "--threads", "1",
                   "--b1", "0.5", "--b2", "0.5", "--out", str(out2)).exit_code == 0
    ref = tmp_path / "ref.csv"
    run_cli("simulate", *SMALL, "--b1", "0.5", "--b2", "0.5", "--out", str(ref))
    assert out2.read_bytes() == ref.read_bytes()
    assert out1.read_bytes() != out2.read_bytes()


def test_config_env_var(tmp_path, monkeypatch):
    cfg = tmp_path / "env.cfg"
    cfg.write_text("n_agents = 31\nhorizon = 40\nn_runs = 1\nmaster_seed = 3\n")
    monkeypatch.setenv("MGMARKET_CONFIG", str(cfg))
    summary = tmp_path / "s.json"
    assert run_cli("simulate", "--threads", "1", "--summary", str(summary)).exit_code == 0
    assert json.loads(summary.read_text())["config"]["n_agents"] == 31


def test_unknown_config_key_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("n_agents = 31\nwibble = 2\n")
    outcome = run_cli("simulate", "--config", str(cfg))
    assert outcome.exit_code == 1
    assert "unknown key" in outcome.message


def test_invalid_flag_is_usage_error():
    assert run_cli("simulate", "--not-a-flag").exit_code == 1
    assert run_cli("bogus-verb").exit_code == 1


def test_even_agent_count_is_usage_error():
    outcome = run_cli("simulate", "--n-agents", "30", "--horizon", "10", "--runs", "1")
    assert outcome.exit_code == 1
    assert "odd" in outcome.message


def test_runtime_error_exit_code():
    outcome = run_cli("simulate", *SMALL, "--initial-price", "4.0", "--horizon", "500")
    assert outcome.exit_code == 2
    assert "market.update_price" in outcome.message


def test_mixing_coupling_flags_rejected():
    outcome = run_cli("simulate", *SMALL, "--b1", "0.5", "--c1", "0.5")
    assert outcome.exit_code == 1


def test_sweep_reduced_grid(tmp_path):
    out = tmp_path / "grid.csv"
    outcome = run_cli(
        "sweep", "--experiment", "homogeneous", *SMALL,
        "--b1-min", "-0.9", "--b1-max", "0.9", "--b1-step", "0.9",
        "--b2-min", "-0.9", "--b2-max", "0.9", "--b2-step", "0.9",
        "--out", str(out),
    )
    assert outcome.exit_code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["axis1", "axis2", "mean_rho", "std_rho", "n_runs"]
    assert len(rows) == 1 + 9
    assert {float(r[0]) for r in rows[1:]} == {-0.9, 0.0, 0.9}


def test_sweep_events_writes_one_grid_per_k(tmp_path):
    out = tmp_path / "grid.csv"
    outcome = run_cli(
        "sweep", "--experiment", "events", *SMALL,
        "--b1-min", "0.5", "--b1-max", "0.5", "--b1-step", "1",
        "--b2-min", "0.5", "--b2-max", "0.5", "--b2-step", "1",
        "--k-values", "1,2", "--event-p", "0.05", "--out", str(out),
    )
    assert outcome.exit_code == 0
    assert (tmp_path / "grid_k1.csv").exists()
    assert (tmp_path / "grid_k2.csv").exists()


def test_sweep_holding_experiment(tmp_path):
    out = tmp_path / "grid.csv"
    outcome = run_cli(
        "sweep", "--experiment", "holding", *SMALL,
        "--b1-min", "0.9", "--b1-max", "0.9", "--b1-step", "1",
        "--b2-min", "0.9", "--b2-max", "0.9", "--b2-step", "1",
        "--out", str(out),
    )
    assert outcome.exit_code == 0
    assert len(list(csv.reader(out.open()))) == 2


def test_regress_on_scatter_and_trajectory(tmp_path):
    scatter = tmp_path / "scatter.csv"
    traj = tmp_path / "traj.csv"
    run_cli("simulate", *SMALL, "--b1", "0.9", "--b2", "0.9",
            "--scatter-out", str(scatter), "--out", str(traj))
    report = tmp_path / "report.csv"
    outcome = run_cli("regress", str(scatter), "--out", str(report))
    assert outcome.exit_code == 0
    rows = list(csv.reader(report.open()))
    assert rows[0] == ["stock", "beta1", "p_value", "r_squared", "n"]
    assert [r[0] for r in rows[1:]] == ["1", "2"]
    assert int(rows[1][4]) == 2 * 50  # two runs pooled
    outcome = run_cli("regress", str(traj), "--out", str(report))
    assert outcome.exit_code == 0
    rows = list(csv.reader(report.open()))
    assert int(rows[1][4]) == 50  # one trajectory


def test_ar1_verb(tmp_path):
    traj = tmp_path / "traj.csv"
    run_cli("simulate", *SMALL, "--b1", "0.5", "--b2", "0.5", "--out", str(traj))
    report = tmp_path / "phi.csv"
    outcome = run_cli("ar1", str(traj), "--out", str(report))
    assert outcome.exit_code == 0
    rows = list(csv.reader(report.open()))
    assert rows[0] == ["stock", "phi", "n"]
    assert len(rows) == 3
    assert int(rows[1][2]) == 49


def test_regress_missing_file_is_runtime_error(tmp_path):
    outcome = run_cli("regress", str(tmp_path / "nope.csv"))
    assert outcome.exit_code == 2


def test_verify_appendix_small(capsys):
    outcome = run_cli("verify-appendix", "--samples", "20000", "--seed", "3")
    assert outcome.exit_code == 0
    printed = capsys.readouterr().out
    assert "verify-appendix: all 64 cells agree" in printed


def test_no_partial_files_on_abort(tmp_path):
    out = tmp_path / "traj.csv"
    outcome = run_cli("simulate", *SMALL, "--initial-price", "4.0",
                      "--horizon", "500", "--out", str(out))
    assert outcome.exit_code == 2
    assert not out.exists()
    assert not any(p.name.startswith(".mgmarket-") for p in tmp_path.iterdir())


def test_help_exits_zero():
    assert run_cli("--help").exit_code == 0
    assert run_cli("simulate", "--help").exit_code == 0
