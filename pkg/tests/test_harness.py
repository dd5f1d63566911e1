"""Experiment harness and CLI checks.

Covers:
  * config file parsing: comments, overrides, unknown keys, bad values,
    line-numbered syntax errors
  * config validation and dotted-key coercion, sweep application, the
    near-square surface layout rule
  * trial execution: seeded determinism, solver sets, cap-based omission of
    the exact search, recorded solver failures, oblivious baseline ordering
  * sweeps and CSV: row grid, 9-digit format, byte-identical re-emission,
    load round-trip, header guard, write-error context, parallel equals
    sequential, timing flag behavior and solver timing order
  * command-line interface: run/sweep/oracle-check/selftest exit codes
"""

import dataclasses
import os

import numpy as np
import pytest

from irsec import (
    ConfigError,
    ExperimentConfig,
    emit_csv,
    load_config,
    load_csv,
    run_sweep,
    run_trial,
    set_config_value,
)
from irsec.cli import main
from irsec.harness import CSV_HEADER, _near_square_rows, apply_sweep

FAST = ExperimentConfig(solvers=("bcd_discrete", "oblivious"), trials=5,
                        report_timing=False)


#### config parsing and validation

def test_config_file_round_trip(tmp_path):
    text = """
# experiment shape
irs.elements = 6            # inline comment
phases.levels = 4
solvers = bcd_discrete, sdp
run.trials = 7
run.seed = 99
sweep.param = lp
sweep.values = 2, 4, 8
blocking.rho = 0.25
blocking.target = irs_beam
run.report_timing = false
"""
    path = tmp_path / "exp.cfg"
    path.write_text(text)
    cfg = load_config(str(path))
    assert cfg.irs_elements == 6
    assert cfg.phase_levels == 4
    assert cfg.solvers == ("bcd_discrete", "sdp")
    assert cfg.trials == 7 and cfg.seed == 99
    assert cfg.sweep_param == "lp"
    assert cfg.sweep_values == (2.0, 4.0, 8.0)
    assert cfg.rho == 0.25 and cfg.blocking_target == "irs_beam"
    assert cfg.report_timing is False
    cfg.validate()


def test_config_unknown_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("irs.sides = 4\n")
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config(str(path))


def test_config_bad_value(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("run.trials = many\n")
    with pytest.raises(ConfigError, match="bad value"):
        load_config(str(path))


def test_config_syntax_error_names_line(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("# header\n\nrun.trials 5\n")
    with pytest.raises(ConfigError, match=":3:"):
        load_config(str(path))


def test_config_missing_file():
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config("/nonexistent/path.cfg")


def test_config_validation_rules():
    with pytest.raises(ConfigError):
        ExperimentConfig(trials=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(solvers=("simulated_annealing",)).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(sweep_param="lp").validate()  # no sweep.values
    with pytest.raises(ConfigError):
        ExperimentConfig(rho=1.5).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(rf_chains=17).validate()  # exceeds 16 antennas
    with pytest.raises(ConfigError):
        ExperimentConfig(phase_levels=1).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(irs_rows=3, irs_elements=4).validate()
    ExperimentConfig().validate()  # defaults are a runnable experiment


def test_set_config_value_coercion():
    cfg = ExperimentConfig()
    cfg = set_config_value(cfg, "system.power_dbm", "17.5")
    assert cfg.power_dbm == 17.5
    cfg = set_config_value(cfg, "run.report_timing", "true")
    assert cfg.report_timing is True
    cfg = set_config_value(cfg, "solvers", "exhaustive")
    assert cfg.solvers == ("exhaustive",)
    with pytest.raises(ConfigError, match="unknown config key"):
        set_config_value(cfg, "bogus.key", "1")
    with pytest.raises(ConfigError, match="bad value"):
        set_config_value(cfg, "run.workers", "some")


def test_near_square_layout():
    assert _near_square_rows(1) == 1
    assert _near_square_rows(4) == 2
    assert _near_square_rows(10) == 2
    assert _near_square_rows(12) == 3
    assert _near_square_rows(100) == 10


def test_apply_sweep_variants():
    cfg_l = ExperimentConfig(sweep_param="lp", sweep_values=(16.0,))
    assert apply_sweep(cfg_l, 16.0).phase_levels == 16
    assert apply_sweep(cfg_l, 16.0).irs_elements == cfg_l.irs_elements
    cfg_p = ExperimentConfig(sweep_param="power", sweep_values=(10.0,))
    assert apply_sweep(cfg_p, 10.0).power_dbm == 10.0
    cfg_n = ExperimentConfig(sweep_param="elements", sweep_values=(50.0,))
    assert apply_sweep(cfg_n, 50.0).irs_elements == 50
    cfg_r = ExperimentConfig(sweep_param="rho", sweep_values=(0.5,),
                             blocking_target="irs_beam")
    assert apply_sweep(cfg_r, 0.5).rho == 0.5
    # single-point runs ignore the value
    cfg = ExperimentConfig()
    assert apply_sweep(cfg, 0.0) == apply_sweep(cfg, 1.0) == cfg


#### trial execution

def test_trial_determinism():
    a = run_trial(FAST, 0.0, 3)
    b = run_trial(FAST, 0.0, 3)
    assert a.rates == b.rates
    assert a.times == b.times  # timing is zeroed, so exact equality holds
    assert a.iterations == b.iterations
    assert a.hybrid_gap == b.hybrid_gap
    c = run_trial(FAST, 0.0, 4)
    assert c.rates != a.rates


def test_trial_runs_requested_solvers():
    cfg = ExperimentConfig(
        solvers=("bcd_discrete", "bcd_continuous", "sdp", "exhaustive",
                 "oblivious"),
        trials=1, report_timing=False)
    rec = run_trial(cfg, 0.0, 0)
    assert set(rec.rates) == set(cfg.solvers)
    assert not rec.failures
    assert all(r >= 0.0 for r in rec.rates.values())


def test_trial_omits_oversized_exact_search():
    cfg = ExperimentConfig(solvers=("bcd_discrete", "exhaustive"),
                           irs_elements=10, phase_levels=8,
                           exhaustive_cap=10_000, trials=1,
                           report_timing=False)
    rec = run_trial(cfg, 0.0, 0)
    assert "exhaustive" not in rec.rates  # silently omitted, not failed
    assert "exhaustive" not in rec.failures
    assert "bcd_discrete" in rec.rates


def test_trial_records_solver_failure():
    # a zero tolerance is unreachable, so the relaxation solver must fail
    cfg = ExperimentConfig(solvers=("bcd_discrete", "sdp"), sdp_tolerance=0.0,
                           trials=1, report_timing=False)
    rec = run_trial(cfg, 0.0, 0)
    assert "sdp" in rec.failures and rec.failures["sdp"]
    assert "sdp" not in rec.rates
    assert "bcd_discrete" in rec.rates  # other solvers unaffected


def test_oblivious_baseline_ordering():
    """Eavesdropper-aware descent beats the oblivious baseline on average,
    and the exact search bounds the descent on every single trial."""
    cfg = ExperimentConfig(solvers=("bcd_discrete", "exhaustive", "oblivious"),
                           trials=40, report_timing=False)
    recs = [run_trial(cfg, 0.0, t) for t in range(cfg.trials)]
    bcd = np.array([r.rates["bcd_discrete"] for r in recs])
    obl = np.array([r.rates["oblivious"] for r in recs])
    exh = np.array([r.rates["exhaustive"] for r in recs])
    assert bcd.mean() >= obl.mean()
    assert np.all(exh >= bcd - 1e-9)


#### sweeps and CSV

def test_sweep_row_grid_and_csv(tmp_path):
    cfg = ExperimentConfig(solvers=("bcd_discrete", "bcd_continuous",
                                    "oblivious"),
                           trials=4, sweep_param="lp",
                           sweep_values=(2.0, 4.0, 8.0, 16.0),
                           report_timing=False)
    res = run_sweep(cfg)
    assert len(res.rows) == 4 * 3  # four sweep points, three solvers
    path = str(tmp_path / "out.csv")
    emit_csv(res, path)
    with open(path, "rb") as fh:
        raw = fh.read()
    lines = raw.decode().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 12
    assert raw.endswith(b"\n") and b"\r" not in raw
    # re-emission is byte-identical
    path2 = str(tmp_path / "out2.csv")
    emit_csv(res, path2)
    with open(path2, "rb") as fh:
        assert fh.read() == raw
    # round-trip through the loader
    rows = load_csv(path)
    assert len(rows) == 12
    by_key = {(r["sweep_value"], r["solver"]): r for r in rows}
    for value, solver, mean_rate, stderr, mean_time, n in res.rows:
        row = by_key[(value, solver)]
        # nine significant digits: the loader sees <= 5e-9 relative error
        assert abs(row["mean_rate"] - mean_rate) <= 1e-8 * max(1.0, mean_rate)
        assert abs(row["stderr_rate"] - stderr) <= 1e-8 * max(1.0, stderr)
        assert row["trials"] == n
        assert row["sweep_param"] == "lp"


def test_sweep_means_match_trials():
    cfg = ExperimentConfig(solvers=("bcd_discrete",), trials=6,
                           report_timing=False)
    res = run_sweep(cfg)
    rates = [run_trial(cfg, 0.0, t).rates["bcd_discrete"]
             for t in range(6)]
    (_, _, mean_rate, stderr, _, n) = res.rows[0]
    assert n == 6
    assert abs(mean_rate - np.mean(rates)) <= 1e-12
    assert abs(stderr - np.std(rates, ddof=1) / np.sqrt(6)) <= 1e-12


def test_parallel_matches_sequential(tmp_path):
    cfg = ExperimentConfig(solvers=("bcd_discrete", "oblivious"), trials=6,
                           sweep_param="lp", sweep_values=(2.0, 8.0),
                           report_timing=False)
    seq = run_sweep(cfg)
    par = run_sweep(dataclasses.replace(cfg, workers=2))
    assert seq.rows == par.rows
    p1, p2 = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    emit_csv(seq, p1)
    emit_csv(par, p2)
    with open(p1, "rb") as f1, open(p2, "rb") as f2:
        assert f1.read() == f2.read()


def test_csv_header_guard(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("alpha,beta\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        load_csv(str(path))


def test_emit_csv_error_names_path(tmp_path):
    cfg = ExperimentConfig(solvers=("oblivious",), trials=2,
                           report_timing=False)
    res = run_sweep(cfg)
    target = str(tmp_path / "no_such_dir" / "out.csv")
    with pytest.raises(OSError, match="no_such_dir"):
        emit_csv(res, target)


def test_timing_flag_behavior():
    cfg_off = ExperimentConfig(solvers=("bcd_discrete",), trials=1,
                               report_timing=False)
    rec = run_trial(cfg_off, 0.0, 0)
    assert rec.times["bcd_discrete"] == 0.0
    cfg_on = ExperimentConfig(solvers=("bcd_discrete",), trials=1,
                              report_timing=True)
    rec = run_trial(cfg_on, 0.0, 0)
    assert rec.times["bcd_discrete"] > 0.0


def test_solver_timing_order():
    """Descent is the cheapest solver at N=4; at N=6 the exact search's
    exponential grid also overtakes the interior-point solve."""
    def best_times(n):
        cfg = ExperimentConfig(solvers=("bcd_discrete", "sdp", "exhaustive"),
                               irs_elements=n, trials=1, report_timing=True)
        best = {}
        for _ in range(3):
            rec = run_trial(cfg, 0.0, 0)
            for s, t in rec.times.items():
                best[s] = min(best.get(s, np.inf), t)
        return best

    t4 = best_times(4)
    assert t4["bcd_discrete"] < t4["sdp"]
    assert t4["bcd_discrete"] < t4["exhaustive"]
    t6 = best_times(6)
    assert t6["bcd_discrete"] < t6["sdp"] < t6["exhaustive"]


#### command-line interface

def test_cli_run_ok(tmp_path, capsys):
    out = str(tmp_path / "run.csv")
    code = main(["run", "--trials", "3", "--set", "run.report_timing=false",
                 "--set", "solvers=bcd_discrete,oblivious", "--out", out])
    assert code == 0
    assert os.path.exists(out)
    assert load_csv(out)
    captured = capsys.readouterr()
    assert "bcd_discrete" in captured.out


def test_cli_rejects_unknown_key(capsys):
    code = main(["run", "--trials", "1", "--set", "bogus=1"])
    assert code == 1
    assert "bogus" in capsys.readouterr().err


def test_cli_reports_solver_failure(capsys):
    code = main(["run", "--trials", "1", "--set", "solvers=sdp",
                 "--set", "sdp.tolerance=0",
                 "--set", "run.report_timing=false"])
    assert code == 2
    assert "sdp" in capsys.readouterr().err


def test_cli_config_file_and_override(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("run.trials = 2\nsolvers = oblivious\n"
                    "run.report_timing = false\n")
    out = str(tmp_path / "o.csv")
    code = main(["run", "--config", str(path), "--trials", "1", "--out", out])
    assert code == 0
    rows = load_csv(out)
    assert rows[0]["trials"] == 1  # the flag overrides the file


def test_cli_sweep(tmp_path):
    out = str(tmp_path / "sweep.csv")
    code = main(["sweep", "--param", "lp", "--values", "2,4", "--trials", "2",
                 "--set", "solvers=bcd_discrete",
                 "--set", "run.report_timing=false", "--out", out])
    assert code == 0
    rows = load_csv(out)
    assert len(rows) == 2
    assert {r["sweep_value"] for r in rows} == {2.0, 4.0}


def test_cli_selftest():
    assert main(["selftest"]) == 0


def test_cli_oracle_check(capsys):
    code = main(["oracle-check", "--trials", "5"])
    assert code == 0
    out = capsys.readouterr().out
    assert "mean gap" in out
    assert "dominated" in out
