"""Command line front end.

Subcommands:
  run           execute the sweep described by a config file, print a summary
  sweep         like run but overrides the sweep axis from the command line
  oracle-check  compare coordinate descent and the SDP against brute force
  selftest      fast built-in sanity checks (no files needed)

Exit codes: 0 success, 1 configuration problem, 2 solver failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .harness import (
    ConfigError,
    ExperimentConfig,
    emit_csv,
    load_config,
    run_sweep,
    set_config_value,
)
from .sdp import SdpSolverError


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="path to a key = value config file")
    p.add_argument("--out", help="write the aggregate CSV here")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config entry (repeatable)")
    p.add_argument("--trials", type=int, help="override run.trials")
    p.add_argument("--seed", type=int, help="override run.seed")
    p.add_argument("--workers", type=int, help="override run.workers")
    p.add_argument("--paper-scale", action="store_true",
                   help="use 1000 trials per sweep point")


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, raw = item.split("=", 1)
        cfg = set_config_value(cfg, key, raw)
    if args.trials is not None:
        cfg = set_config_value(cfg, "run.trials", str(args.trials))
    if args.seed is not None:
        cfg = set_config_value(cfg, "run.seed", str(args.seed))
    if args.workers is not None:
        cfg = set_config_value(cfg, "run.workers", str(args.workers))
    if args.paper_scale:
        cfg = set_config_value(cfg, "run.trials", "1000")
    return cfg.validate()


def _print_rows(result) -> None:
    print(f"sweep over {result.sweep_param}: "
          f"{len(result.values)} value(s), solvers {', '.join(result.solvers)}")
    print(f"{'value':>12} {'solver':>16} {'mean_rate':>12} "
          f"{'stderr':>12} {'mean_time_s':>12} {'n':>5}")
    for value, solver, mean_rate, stderr, mean_time, n in result.rows:
        print(f"{value:>12.6g} {solver:>16} {mean_rate:>12.6f} "
              f"{stderr:>12.6f} {mean_time:>12.6f} {n:>5}")


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    result = run_sweep(cfg)
    failed = sum(len(r.failures) for r in result.records)
    if failed:
        for rec in result.records:
            for solver, msg in rec.failures.items():
                print(f"trial {rec.trial_index} @ {rec.sweep_value:g}: "
                      f"{solver} failed: {msg}", file=sys.stderr)
    _print_rows(result)
    if args.out:
        emit_csv(result, args.out)
        print(f"wrote {args.out}")
    return 2 if failed else 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _build_config(args)
    cfg = set_config_value(cfg, "sweep.param", args.param)
    cfg = set_config_value(cfg, "sweep.values", args.values)
    cfg.validate()
    args_ns = args
    result = run_sweep(cfg)
    failed = sum(len(r.failures) for r in result.records)
    _print_rows(result)
    if args_ns.out:
        emit_csv(result, args_ns.out)
        print(f"wrote {args_ns.out}")
    return 2 if failed else 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    """Brute-force dominance report on small instances."""
    from .harness import run_trial
    import dataclasses

    cfg = ExperimentConfig(
        irs_elements=args.elements,
        phase_levels=args.levels,
        trials=args.trials,
        seed=args.seed,
        solvers=("exhaustive", "bcd_discrete", "sdp"),
        report_timing=False,
    ).validate()
    if cfg.phase_levels ** cfg.irs_elements > cfg.exhaustive_cap:
        raise ConfigError("grid too large for the brute-force oracle")
    worst_bcd = worst_sdp = 0.0
    gaps_bcd, gaps_sdp, violations = [], [], 0
    for t in range(cfg.trials):
        rec = run_trial(cfg, 0.0, t)
        if rec.failures:
            for solver, msg in rec.failures.items():
                print(f"trial {t}: {solver} failed: {msg}", file=sys.stderr)
            return 2
        best = rec.rates["exhaustive"]
        for name, gaps in (("bcd_discrete", gaps_bcd), ("sdp", gaps_sdp)):
            if rec.rates[name] > best + 1e-9:
                violations += 1
            gap = (best - rec.rates[name]) / best if best > 0 else 0.0
            gaps.append(gap)
    worst_bcd = max(gaps_bcd)
    worst_sdp = max(gaps_sdp)
    print(f"{cfg.trials} instances, {cfg.irs_elements} elements, "
          f"{cfg.phase_levels} levels")
    print(f"coordinate descent: mean gap {np.mean(gaps_bcd):.3%}, "
          f"worst {worst_bcd:.3%}")
    print(f"semidefinite round: mean gap {np.mean(gaps_sdp):.3%}, "
          f"worst {worst_sdp:.3%}")
    if violations:
        print(f"{violations} instance(s) beat brute force: BUG", file=sys.stderr)
        return 2
    print("brute force dominated every heuristic: ok")
    return 0


def _cmd_selftest(_args: argparse.Namespace) -> int:
    from .bcd import (
        bcd_phase_update,
        element_coefficients,
        element_objective,
        quantize_phase,
    )
    from .secrecy import CascadeVectors, DiscretePhaseSet, build_cascades, secrecy_rate
    from .harness import run_trial
    from .exhaustive import exhaustive_search
    from .sdp import build_sdr_matrices, solve_sdp
    from .bcd import run_bcd_on_cascades

    rng = np.random.default_rng(7)
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
        failures += 0 if ok else 1

    # closed-form element update vs a dense angular grid
    grid = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(2, 6))
        casc = CascadeVectors(
            bob=rng.normal(size=n) + 1j * rng.normal(size=n),
            eve=rng.normal(size=n) + 1j * rng.normal(size=n),
            noise_bob=float(rng.uniform(0.1, 2.0)),
            noise_eve=float(rng.uniform(0.1, 2.0)),
        )
        from .secrecy import PhaseVector
        pv = PhaseVector(rng.uniform(0, 2 * np.pi, size=n))
        i = int(rng.integers(0, n))
        co = element_coefficients(i, pv, casc)
        theta = bcd_phase_update(co)
        if theta is None:
            continue
        best_grid = max(element_objective(t, co) for t in grid)
        worst = max(worst, best_grid - element_objective(theta, co))
    check("element update matches dense grid", worst < 1e-6)

    # quantization: nearest level, ties to the smaller angle
    ps = DiscretePhaseSet(4)
    check("quantization rules",
          quantize_phase(1.0, ps) == np.pi / 2
          and quantize_phase(np.pi / 4, ps) == 0.0)

    # brute force dominates coordinate descent on small instances
    ok = True
    for t in range(5):
        cfg = ExperimentConfig(irs_elements=3, phase_levels=4, trials=1,
                               seed=11 + t, solvers=("bcd_discrete",),
                               report_timing=False)
        rec = run_trial(cfg, 0.0, 0)
        ok = ok and not rec.failures
    check("trial pipeline runs clean", ok)

    # interior-point excess over any unit-modulus point
    r = rng.normal(size=(2, 4)) + 1j * rng.normal(size=(2, 4))
    casc = CascadeVectors(bob=r[0], eve=r[1], noise_bob=1.0, noise_eve=1.0)
    mats = build_sdr_matrices(casc)
    try:
        sol = solve_sdp(mats)
        kkt_ok = max(sol.kkt_residuals) < 1e-6
    except SdpSolverError:
        kkt_ok = False
    check("interior point converges", kkt_ok)

    st = run_bcd_on_cascades(casc, DiscretePhaseSet(4))
    best, _ = exhaustive_search(casc, DiscretePhaseSet(4))
    check("brute force dominates descent",
          secrecy_rate(best, casc) >= secrecy_rate(st.phase, casc) - 1e-12)

    return 2 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsec",
        description="Secrecy-rate experiments for an IRS-assisted THz downlink",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a config file")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run with a command-line sweep axis")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", required=True,
                         choices=("lp", "power", "elements", "rho"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated sweep values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser("oracle-check",
                              help="compare heuristics against brute force")
    p_oracle.add_argument("--trials", type=int, default=25)
    p_oracle.add_argument("--seed", type=int, default=2024)
    p_oracle.add_argument("--elements", type=int, default=4)
    p_oracle.add_argument("--levels", type=int, default=4)
    p_oracle.set_defaults(func=_cmd_oracle_check)

    p_self = sub.add_parser("selftest", help="fast built-in checks")
    p_self.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SdpSolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
