"""Monte Carlo harness: config, trial execution, sweeps, CSV emission.

A trial synthesizes one channel realization, fixes the transmit vector, runs
the selected phase optimizers and records rates and timings. Sweeps repeat
trials over a parameter grid and aggregate means and standard errors into a
deterministic CSV: with a fixed config and master seed every non-timing byte
of the output is reproducible (and every byte with run.report_timing off).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .beamforming import (
    gevd_beamformer,
    mrt_beamformer,
    omp_hybrid_decompose,
    steering_dictionary,
)
from .bcd import bob_aligned_init, run_bcd_on_cascades
from .channel import (
    ArrayGeometry,
    ChannelSet,
    PathGainModel,
    ScenarioGeometry,
    apply_blocking,
    build_bs_irs_channel,
    build_direct_bs_eve_channel,
    build_irs_user_channel,
)
from .exhaustive import exhaustive_search
from .sdp import (
    SdpSolverError,
    build_sdr_matrices,
    gaussian_randomize,
    solve_sdp,
)
from .bcd import quantize_phase
from .secrecy import (
    CascadeVectors,
    DiscretePhaseSet,
    PhaseVector,
    build_cascades,
    secrecy_rate,
)

SOLVER_NAMES = ("bcd_discrete", "bcd_continuous", "sdp", "exhaustive", "oblivious")
SWEEP_PARAMS = ("single", "lp", "power", "elements", "rho")

CSV_HEADER = "sweep_param,sweep_value,solver,mean_rate,stderr_rate,mean_time_s,trials"


class ConfigError(ValueError):
    """Bad configuration file, key, or value."""


@dataclass(frozen=True)
class ExperimentConfig:
    frequency_hz: float = 3.0e11
    absorption_per_m: float = 0.0033
    tx_gain_dbi: float = 12.0
    rx_gain_dbi: float = 12.0
    power_dbm: float = 25.0
    noise_bob_dbm: float = -55.0
    noise_eve_dbm: float = -55.0
    bs_antennas: int = 16
    rf_chains: int = 10
    irs_elements: int = 4
    irs_rows: int = 0            # 0 = choose the most square factorization
    element_spacing: float = 0.5
    d_sr: float = 5.0
    d_rd: float = 5.0
    d_re: float = 5.0
    d_se: float = 5.0
    bs_irs_angle: float = 0.5236
    irs_azimuth: float = -0.7854
    irs_elevation: float = 0.0
    num_paths: int = 3
    phase_levels: int = 8
    rho: float = 0.0
    blocking_target: str = "none"
    solvers: tuple = ("bcd_discrete",)
    trials: int = 100
    seed: int = 2024
    workers: int = 1
    report_timing: bool = True
    sweep_param: str = "single"
    sweep_values: tuple = ()
    gaussian_samples: int = 100
    sdp_tolerance: float = 1e-8
    bcd_epsilon: float = 1e-4
    bcd_max_iters: int = 100
    exhaustive_cap: int = 10_000_000

    def validate(self) -> "ExperimentConfig":
        if self.trials < 1:
            raise ConfigError("run.trials must be at least 1")
        if self.seed < 0:
            raise ConfigError("run.seed must be non-negative")
        if self.workers < 1:
            raise ConfigError("run.workers must be at least 1")
        if self.phase_levels < 2:
            raise ConfigError("phases.levels must be at least 2")
        if self.irs_elements < 1:
            raise ConfigError("irs.elements must be positive")
        if self.irs_rows and self.irs_elements % self.irs_rows:
            raise ConfigError("irs.rows must divide irs.elements")
        if not self.solvers:
            raise ConfigError("at least one solver must be selected")
        for s in self.solvers:
            if s not in SOLVER_NAMES:
                raise ConfigError(f"unknown solver {s!r}; pick from {SOLVER_NAMES}")
        if self.sweep_param not in SWEEP_PARAMS:
            raise ConfigError(
                f"unknown sweep param {self.sweep_param!r}; pick from {SWEEP_PARAMS}"
            )
        if self.sweep_param != "single" and not self.sweep_values:
            raise ConfigError("sweep.values must be non-empty for a sweep")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError("blocking.rho must be in [0, 1]")
        if self.blocking_target not in ("none", "irs_beam", "bs_beam"):
            raise ConfigError(f"unknown blocking.target {self.blocking_target!r}")
        if not 1 <= self.rf_chains <= self.bs_antennas:
            raise ConfigError("bs.rf_chains must be in [1, bs.antennas]")
        return self


# dotted config keys -> dataclass fields
KEY_MAP = {
    "system.frequency_hz": "frequency_hz",
    "system.absorption_per_m": "absorption_per_m",
    "system.tx_gain_dbi": "tx_gain_dbi",
    "system.rx_gain_dbi": "rx_gain_dbi",
    "system.power_dbm": "power_dbm",
    "system.noise_bob_dbm": "noise_bob_dbm",
    "system.noise_eve_dbm": "noise_eve_dbm",
    "bs.antennas": "bs_antennas",
    "bs.rf_chains": "rf_chains",
    "irs.elements": "irs_elements",
    "irs.rows": "irs_rows",
    "irs.spacing": "element_spacing",
    "geometry.d_sr": "d_sr",
    "geometry.d_rd": "d_rd",
    "geometry.d_re": "d_re",
    "geometry.d_se": "d_se",
    "geometry.bs_irs_angle": "bs_irs_angle",
    "geometry.irs_azimuth": "irs_azimuth",
    "geometry.irs_elevation": "irs_elevation",
    "channel.paths": "num_paths",
    "phases.levels": "phase_levels",
    "blocking.rho": "rho",
    "blocking.target": "blocking_target",
    "solvers": "solvers",
    "run.trials": "trials",
    "run.seed": "seed",
    "run.workers": "workers",
    "run.report_timing": "report_timing",
    "sweep.param": "sweep_param",
    "sweep.values": "sweep_values",
    "sdp.gaussian_samples": "gaussian_samples",
    "sdp.tolerance": "sdp_tolerance",
    "bcd.epsilon": "bcd_epsilon",
    "bcd.max_iters": "bcd_max_iters",
    "exhaustive.cap": "exhaustive_cap",
}

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(field_name: str, raw: str):
    raw = raw.strip()
    kind = _FIELD_TYPES[field_name]
    try:
        if field_name == "solvers":
            return tuple(s.strip() for s in raw.split(",") if s.strip())
        if field_name == "sweep_values":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(float(raw)) if ("e" in raw.lower() or "." in raw) else int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value {raw!r} for {field_name}") from exc


def set_config_value(cfg: ExperimentConfig, dotted_key: str, raw: str) -> ExperimentConfig:
    key = dotted_key.strip()
    if key not in KEY_MAP:
        raise ConfigError(f"unknown config key {key!r}")
    field_name = KEY_MAP[key]
    return replace(cfg, **{field_name: _coerce(field_name, raw)})


def load_config(path: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse a flat key = value file ('#' starts a comment)."""
    cfg = base if base is not None else ExperimentConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {body!r}")
        key, raw = body.split("=", 1)
        cfg = set_config_value(cfg, key.strip(), raw)
    return cfg


@dataclass
class TrialRecord:
    sweep_value: float
    trial_index: int
    rates: dict            # solver -> secrecy rate (bits/s/Hz)
    times: dict            # solver -> wall seconds (zeroed if timing off)
    iterations: dict       # solver -> sweeps / IPM steps / candidates
    failures: dict         # solver -> error message
    hybrid_gap: float      # digital-minus-hybrid rate at the lead solver's phases


@dataclass
class SweepResult:
    sweep_param: str
    values: tuple
    solvers: tuple
    rows: list             # aggregated (value, solver, mean, stderr, mean_time, n)
    records: list          # all TrialRecords in (value, trial) order


def _dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def _near_square_rows(n: int) -> int:
    r = int(np.floor(np.sqrt(n)))
    while r > 1 and n % r:
        r -= 1
    return max(r, 1)


def apply_sweep(cfg: ExperimentConfig, value: float) -> ExperimentConfig:
    p = cfg.sweep_param
    if p == "single":
        return cfg
    if p == "lp":
        return replace(cfg, phase_levels=int(value))
    if p == "power":
        return replace(cfg, power_dbm=float(value))
    if p == "elements":
        return replace(cfg, irs_elements=int(value), irs_rows=0)
    if p == "rho":
        return replace(cfg, rho=float(value))
    raise ConfigError(f"unknown sweep param {p!r}")


def _trial_rngs(seed: int, trial_index: int):
    # channel draws keyed by (seed, trial) only, so sweep points share
    # realizations (common random numbers); the sampler stream is separate
    ss = np.random.SeedSequence([int(seed), int(trial_index)])
    chan_ss, samp_ss = ss.spawn(2)
    return np.random.default_rng(chan_ss), np.random.default_rng(samp_ss)


def synthesize_channels(cfg: ExperimentConfig, rng: np.random.Generator) -> ChannelSet:
    model = PathGainModel(
        carrier_frequency=cfg.frequency_hz,
        absorption=cfg.absorption_per_m,
        tx_gain_dbi=cfg.tx_gain_dbi,
        rx_gain_dbi=cfg.rx_gain_dbi,
    )
    rows = cfg.irs_rows or _near_square_rows(cfg.irs_elements)
    bs = ArrayGeometry.ula(cfg.bs_antennas, cfg.element_spacing)
    irs = ArrayGeometry.ura(rows, cfg.irs_elements // rows, cfg.element_spacing)
    scenario = ScenarioGeometry(
        d_sr=cfg.d_sr, d_rd=cfg.d_rd, d_re=cfg.d_re, d_se=cfg.d_se,
        bs_irs_angle=cfg.bs_irs_angle,
        irs_azimuth=cfg.irs_azimuth,
        irs_elevation=cfg.irs_elevation,
        blocking_fraction=cfg.rho,
        blocking_target=cfg.blocking_target,
    )
    bs_irs = build_bs_irs_channel(model, bs, irs, scenario, rng)
    g_bob = build_irs_user_channel(model, irs, cfg.d_rd, cfg.num_paths, rng).vector
    g_eve = build_irs_user_channel(model, irs, cfg.d_re, cfg.num_paths, rng).vector
    h_eve = None
    if cfg.blocking_target == "bs_beam":
        h_eve = build_direct_bs_eve_channel(model, bs, cfg.d_se, cfg.num_paths, rng).vector
    channels = ChannelSet(bs_irs=bs_irs, irs_bob=g_bob, irs_eve=g_eve, bs_eve=h_eve)
    return apply_blocking(channels, scenario, model)


def _effective_user_channels(channels: ChannelSet, phase: PhaseVector):
    """Transmit-side M-vectors seen by Bob and Eve at fixed surface phases."""
    hmat = channels.bs_irs.as_matrix()
    unit = phase.unit()
    h_bob = ((channels.irs_bob.conj() * unit) @ hmat).conj()
    h_eve = ((channels.irs_eve.conj() * unit) @ hmat).conj()
    if channels.bs_eve is not None:
        h_eve = h_eve + channels.bs_eve
    return h_bob, h_eve


def _alternating_beamformer(channels: ChannelSet, power: float, noise_bob: float,
                            noise_eve: float, phase_set: DiscretePhaseSet,
                            cfg: ExperimentConfig, cap: int = 20,
                            rate_tol: float = 1e-5):
    """Alternate generalized-eigenvector w and coordinate-descent phases."""
    w = mrt_beamformer(channels.bs_irs.bs_steering, power)
    prev_rate = -np.inf
    rounds = 0
    for _ in range(cap):
        rounds += 1
        cascades = build_cascades(channels, w, noise_bob, noise_eve)
        state = run_bcd_on_cascades(cascades, phase_set,
                                    epsilon=cfg.bcd_epsilon,
                                    max_iters=cfg.bcd_max_iters)
        h_bob, h_eve = _effective_user_channels(channels, state.phase)
        w = gevd_beamformer(h_bob, h_eve, power, noise_bob, noise_eve)
        rate = secrecy_rate(state.phase,
                            build_cascades(channels, w, noise_bob, noise_eve))
        if abs(rate - prev_rate) < rate_tol:
            break
        prev_rate = rate
    return w, rounds


def run_trial(cfg: ExperimentConfig, sweep_value: float, trial_index: int) -> TrialRecord:
    """One seeded realization: channels, transmit vector, all selected solvers."""
    cfg_t = apply_sweep(cfg, sweep_value)
    chan_rng, samp_rng = _trial_rngs(cfg.seed, trial_index)
    channels = synthesize_channels(cfg_t, chan_rng)
    power = _dbm_to_watt(cfg_t.power_dbm)
    noise_bob = _dbm_to_watt(cfg_t.noise_bob_dbm)
    noise_eve = _dbm_to_watt(cfg_t.noise_eve_dbm)
    phase_set = DiscretePhaseSet(cfg_t.phase_levels)

    if cfg_t.blocking_target == "bs_beam":
        w, _ = _alternating_beamformer(channels, power, noise_bob, noise_eve,
                                       phase_set, cfg_t)
    else:
        w = mrt_beamformer(channels.bs_irs.bs_steering, power)
    cascades = build_cascades(channels, w, noise_bob, noise_eve)

    rates: dict = {}
    times: dict = {}
    iters: dict = {}
    failures: dict = {}
    lead_phase: PhaseVector | None = None
    for solver in cfg_t.solvers:
        if solver == "exhaustive" and \
                cfg_t.phase_levels ** cfg_t.irs_elements > cfg_t.exhaustive_cap:
            continue  # omitted, not failed: the grid is too large by config
        t0 = time.perf_counter()
        try:
            if solver == "bcd_discrete":
                st = run_bcd_on_cascades(cascades, phase_set,
                                         epsilon=cfg_t.bcd_epsilon,
                                         max_iters=cfg_t.bcd_max_iters)
                pv, n_it = st.phase, st.iterations
            elif solver == "bcd_continuous":
                st = run_bcd_on_cascades(cascades, None,
                                         epsilon=cfg_t.bcd_epsilon,
                                         max_iters=cfg_t.bcd_max_iters)
                pv, n_it = st.phase, st.iterations
            elif solver == "sdp":
                mats = build_sdr_matrices(cascades)
                sol = solve_sdp(mats, tolerance=cfg_t.sdp_tolerance)
                relaxed, _ = gaussian_randomize(sol, mats, cfg_t.gaussian_samples,
                                                samp_rng)
                snapped = np.array([quantize_phase(t, phase_set)
                                    for t in relaxed.thetas])
                pv, n_it = PhaseVector(snapped, phase_set), sol.iterations
            elif solver == "exhaustive":
                pv, _ = exhaustive_search(cascades, phase_set,
                                          cap=cfg_t.exhaustive_cap)
                n_it = cfg_t.phase_levels ** cfg_t.irs_elements
            elif solver == "oblivious":
                pv, n_it = bob_aligned_init(cascades, phase_set), 1
            else:  # pragma: no cover - validate() rejects unknown names
                raise ConfigError(f"unknown solver {solver!r}")
        except SdpSolverError as exc:
            failures[solver] = str(exc)
            continue
        elapsed = time.perf_counter() - t0
        rates[solver] = secrecy_rate(pv, cascades)
        times[solver] = elapsed if cfg_t.report_timing else 0.0
        iters[solver] = n_it
        if lead_phase is None:
            lead_phase = pv

    hybrid_gap = float("nan")
    if lead_phase is not None:
        bs = ArrayGeometry.ula(cfg_t.bs_antennas, cfg_t.element_spacing)
        atoms = steering_dictionary(bs)
        hybrid = omp_hybrid_decompose(w, atoms, cfg_t.rf_chains).hybrid()
        casc_h = build_cascades(channels, hybrid, noise_bob, noise_eve)
        digital = secrecy_rate(lead_phase, cascades)
        hybrid_gap = digital - secrecy_rate(lead_phase, casc_h)

    return TrialRecord(
        sweep_value=float(sweep_value),
        trial_index=trial_index,
        rates=rates,
        times=times,
        iterations=iters,
        failures=failures,
        hybrid_gap=hybrid_gap,
    )


def _trial_task(args):
    cfg, value, idx = args
    return run_trial(cfg, value, idx)


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Run trials for every sweep value and aggregate in a fixed order."""
    cfg.validate()
    values = cfg.sweep_values if cfg.sweep_param != "single" else (0.0,)
    if cfg.sweep_param == "single" and cfg.sweep_values:
        values = cfg.sweep_values[:1]
    tasks = [(cfg, float(v), t) for v in values for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_trial_task, tasks, chunksize=4))
    else:
        records = [_trial_task(t) for t in tasks]

    rows = []
    per_value = {float(v): [] for v in values}
    for rec in records:
        per_value[rec.sweep_value].append(rec)
    for v in values:
        group = per_value[float(v)]
        for solver in cfg.solvers:
            rs = np.array([r.rates[solver] for r in group if solver in r.rates])
            ts = np.array([r.times[solver] for r in group if solver in r.times])
            if rs.size == 0:
                continue
            stderr = float(np.std(rs, ddof=1) / np.sqrt(rs.size)) if rs.size > 1 else 0.0
            rows.append((float(v), solver, float(np.mean(rs)), stderr,
                         float(np.mean(ts)), int(rs.size)))
    return SweepResult(
        sweep_param=cfg.sweep_param,
        values=tuple(float(v) for v in values),
        solvers=tuple(cfg.solvers),
        rows=rows,
        records=records,
    )


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def emit_csv(result: SweepResult, path: str) -> None:
    """Write the aggregate table: LF endings, 9 significant digits."""
    lines = [CSV_HEADER]
    for value, solver, mean_rate, stderr, mean_time, n in result.rows:
        lines.append(
            f"{result.sweep_param},{_fmt(value)},{solver},"
            f"{_fmt(mean_rate)},{_fmt(stderr)},{_fmt(mean_time)},{n}"
        )
    data = ("\n".join(lines) + "\n").encode("utf-8")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def load_csv(path: str) -> list:
    """Read an emitted CSV back into dict rows (floats/ints restored)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    except OSError as exc:
        raise OSError(f"cannot read CSV from {path}: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing or unexpected header")
    out = []
    for ln in lines[1:]:
        p, v, s, mr, se, mt, n = ln.split(",")
        out.append({
            "sweep_param": p,
            "sweep_value": float(v),
            "solver": s,
            "mean_rate": float(mr),
            "stderr_rate": float(se),
            "mean_time_s": float(mt),
            "trials": int(n),
        })
    return out
