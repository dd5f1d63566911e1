"""Secrecy-rate toolkit for an IRS-assisted mmWave/THz downlink.

Channel synthesis, closed-form transmit beamforming, discrete phase-shift
optimizers (coordinate descent, semidefinite relaxation, brute force) and a
seeded Monte Carlo harness with CSV output.
"""

from .beamforming import (
    BeamformerSolution,
    gevd_beamformer,
    mrt_beamformer,
    omp_hybrid_decompose,
    steering_dictionary,
)
from .bcd import (
    BcdState,
    ElementCoefficients,
    bcd_phase_update,
    bob_aligned_init,
    element_coefficients,
    element_objective,
    quantize_phase,
    run_bcd,
    run_bcd_on_cascades,
    zero_init,
)
from .channel import (
    ArrayGeometry,
    ChannelSet,
    MultipathChannel,
    PathGainModel,
    RankOneChannel,
    ScenarioGeometry,
    apply_blocking,
    build_bs_irs_channel,
    build_direct_bs_eve_channel,
    build_irs_user_channel,
    path_gain,
    steering_ula,
    steering_ura,
)
from .exhaustive import exhaustive_search
from .harness import (
    ConfigError,
    ExperimentConfig,
    SweepResult,
    TrialRecord,
    emit_csv,
    load_config,
    load_csv,
    run_sweep,
    run_trial,
    set_config_value,
    synthesize_channels,
)
from .sdp import (
    SdpSolution,
    SdpSolverError,
    SdrMatrices,
    build_sdr_matrices,
    gaussian_randomize,
    sdp_pipeline,
    solve_sdp,
)
from .secrecy import (
    CascadeVectors,
    DiscretePhaseSet,
    PhaseVector,
    build_cascades,
    effective_gain,
    secrecy_rate,
    secrecy_ratio,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "BcdState",
    "BeamformerSolution",
    "CascadeVectors",
    "ChannelSet",
    "ConfigError",
    "DiscretePhaseSet",
    "ElementCoefficients",
    "ExperimentConfig",
    "MultipathChannel",
    "PathGainModel",
    "PhaseVector",
    "RankOneChannel",
    "ScenarioGeometry",
    "SdpSolution",
    "SdpSolverError",
    "SdrMatrices",
    "SweepResult",
    "TrialRecord",
    "apply_blocking",
    "bcd_phase_update",
    "bob_aligned_init",
    "build_bs_irs_channel",
    "build_cascades",
    "build_direct_bs_eve_channel",
    "build_irs_user_channel",
    "build_sdr_matrices",
    "effective_gain",
    "element_coefficients",
    "element_objective",
    "emit_csv",
    "exhaustive_search",
    "gaussian_randomize",
    "gevd_beamformer",
    "load_config",
    "load_csv",
    "mrt_beamformer",
    "omp_hybrid_decompose",
    "path_gain",
    "quantize_phase",
    "run_bcd",
    "run_bcd_on_cascades",
    "run_sweep",
    "run_trial",
    "sdp_pipeline",
    "secrecy_rate",
    "secrecy_ratio",
    "set_config_value",
    "solve_sdp",
    "steering_dictionary",
    "steering_ula",
    "steering_ura",
    "synthesize_channels",
    "zero_init",
]
