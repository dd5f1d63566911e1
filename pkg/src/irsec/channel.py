"""Channel synthesis for a reflecting-surface assisted mmWave/THz downlink.

Geometry: a ULA transmitter illuminates a URA reflecting surface; the surface
serves a single-antenna receiver (Bob) while an eavesdropper (Eve) listens.
The transmitter-surface link is modeled rank-one (LoS-dominant), the
surface-user links as few-path spatial channels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C_LIGHT = 3e8  # m/s

BLOCKING_TARGETS = ("none", "irs_beam", "bs_beam")


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna array layout. kind is 'ula' or 'ura'; spacing in wavelengths."""

    kind: str
    num_elements: int
    element_spacing: float = 0.5
    rows: int = 1
    cols: int = 1

    def __post_init__(self):
        if self.kind not in ("ula", "ura"):
            raise ValueError(f"unknown array kind {self.kind!r}")
        if self.num_elements < 1:
            raise ValueError("num_elements must be positive")
        if self.element_spacing <= 0:
            raise ValueError("element_spacing must be positive")
        if self.kind == "ura" and self.rows * self.cols != self.num_elements:
            raise ValueError(
                f"URA rows*cols = {self.rows * self.cols} != {self.num_elements}"
            )

    @classmethod
    def ula(cls, num_elements: int, element_spacing: float = 0.5) -> "ArrayGeometry":
        return cls("ula", num_elements, element_spacing)

    @classmethod
    def ura(cls, rows: int, cols: int, element_spacing: float = 0.5) -> "ArrayGeometry":
        return cls("ura", rows * cols, element_spacing, rows=rows, cols=cols)


@dataclass(frozen=True)
class PathGainModel:
    """Free-space spreading with exponential molecular absorption.

    carrier_frequency in Hz, absorption in 1/m, antenna gains in dBi.
    """

    carrier_frequency: float
    absorption: float = 0.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 0.0

    def __post_init__(self):
        if self.carrier_frequency <= 0:
            raise ValueError("carrier_frequency must be positive")
        if self.absorption < 0:
            raise ValueError("absorption must be non-negative")

    @property
    def tx_gain(self) -> float:
        return 10.0 ** (self.tx_gain_dbi / 10.0)

    @property
    def rx_gain(self) -> float:
        return 10.0 ** (self.rx_gain_dbi / 10.0)


@dataclass(frozen=True)
class ScenarioGeometry:
    """Link distances (m), pointing angles (rad) and the blocking setup.

    d_sr: transmitter to surface, d_rd: surface to Bob, d_re: surface to Eve,
    d_se: transmitter to Eve (only used when Eve has a direct link).
    blocking_fraction is the power fraction rho stripped from the blocked beam.
    """

    d_sr: float = 5.0
    d_rd: float = 5.0
    d_re: float = 5.0
    d_se: float = 5.0
    bs_irs_angle: float = 0.5236
    irs_azimuth: float = -0.7854
    irs_elevation: float = 0.0
    blocking_fraction: float = 0.0
    blocking_target: str = "none"

    def __post_init__(self):
        for name in ("d_sr", "d_rd", "d_re", "d_se"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.blocking_fraction <= 1.0:
            raise ValueError("blocking_fraction must be in [0, 1]")
        if self.blocking_target not in BLOCKING_TARGETS:
            raise ValueError(f"unknown blocking_target {self.blocking_target!r}")


def steering_ula(geometry: ArrayGeometry, angle: float) -> np.ndarray:
    """Unit-norm ULA steering vector at the given angle (rad off broadside)."""
    if geometry.kind != "ula":
        raise ValueError("steering_ula needs a ULA geometry")
    m = np.arange(geometry.num_elements)
    phase = 2.0 * np.pi * geometry.element_spacing * m * np.sin(angle)
    return np.exp(1j * phase) / np.sqrt(geometry.num_elements)


def steering_ura(geometry: ArrayGeometry, azimuth: float, elevation: float) -> np.ndarray:
    """Unit-norm URA steering vector, Kronecker of row and column phase ramps.

    Row index advances with sin(elevation), column index with
    sin(azimuth)*cos(elevation). Entry (r, c) sits at flat position r*cols + c.
    """
    if geometry.kind != "ura":
        raise ValueError("steering_ura needs a URA geometry")
    d = geometry.element_spacing
    r = np.arange(geometry.rows)
    c = np.arange(geometry.cols)
    row_ramp = np.exp(2j * np.pi * d * r * np.sin(elevation)) / np.sqrt(geometry.rows)
    col_ramp = np.exp(2j * np.pi * d * c * np.sin(azimuth) * np.cos(elevation)) / np.sqrt(
        geometry.cols
    )
    return np.kron(row_ramp, col_ramp)


def path_gain(model: PathGainModel, distance: float,
              rng: np.random.Generator | None = None) -> complex:
    """Complex path gain: spreading-plus-absorption magnitude, uniform phase.

    |alpha| = (c / (4 pi f d)) * exp(-0.5 * k(f) * d)

    Without an rng the phase is zero, which exposes the magnitude directly.
    """
    if distance <= 0:
        raise ValueError("distance must be positive")
    mag = C_LIGHT / (4.0 * np.pi * model.carrier_frequency * distance)
    mag *= np.exp(-0.5 * model.absorption * distance)
    if rng is None:
        return complex(mag)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return mag * np.exp(1j * phase)


@dataclass
class RankOneChannel:
    """Rank-one transmitter-to-surface channel gain * a b^H (receive form).

    gain aggregates sqrt(M N), the complex path gain and both antenna gains.
    irs_steering (a) is the surface-side response, bs_steering (b) the
    transmitter-side response.
    """

    gain: complex
    irs_steering: np.ndarray
    bs_steering: np.ndarray

    def as_matrix(self) -> np.ndarray:
        """N x M receive-side matrix: gain * outer(a, conj(b))."""
        return self.gain * np.outer(self.irs_steering, self.bs_steering.conj())


@dataclass
class MultipathChannel:
    """Few-path channel to a single-antenna user.

    vector = sqrt(dim / num_paths) * gain_scale * sum_i per_path_gains[i] *
    per_path_steering[i], with gain_scale the linear product of the two
    antenna gains on the link.
    """

    vector: np.ndarray
    num_paths: int
    per_path_gains: np.ndarray
    per_path_steering: np.ndarray  # (num_paths, dim)
    gain_scale: float

    def reconstruct(self) -> np.ndarray:
        dim = self.per_path_steering.shape[1]
        scale = np.sqrt(dim / self.num_paths) * self.gain_scale
        return scale * (self.per_path_gains @ self.per_path_steering)


@dataclass
class ChannelSet:
    """Realized channels for one trial."""

    bs_irs: RankOneChannel
    irs_bob: np.ndarray
    irs_eve: np.ndarray
    bs_eve: np.ndarray | None = None


def build_bs_irs_channel(
    model: PathGainModel,
    bs_geometry: ArrayGeometry,
    irs_geometry: ArrayGeometry,
    scenario: ScenarioGeometry,
    rng: np.random.Generator,
) -> RankOneChannel:
    """Synthesize the rank-one transmitter-to-surface channel."""
    m = bs_geometry.num_elements
    n = irs_geometry.num_elements
    alpha = path_gain(model, scenario.d_sr, rng)
    gain = np.sqrt(m * n) * alpha * model.tx_gain * model.rx_gain
    a = steering_ura(irs_geometry, scenario.irs_azimuth, scenario.irs_elevation)
    b = steering_ula(bs_geometry, scenario.bs_irs_angle)
    return RankOneChannel(gain=gain, irs_steering=a, bs_steering=b)


def _random_angles(rng: np.random.Generator) -> tuple[float, float]:
    az = rng.uniform(-np.pi / 2, np.pi / 2)
    el = rng.uniform(-np.pi / 2, np.pi / 2)
    return az, el


def build_irs_user_channel(
    model: PathGainModel,
    irs_geometry: ArrayGeometry,
    distance: float,
    num_paths: int,
    rng: np.random.Generator,
) -> MultipathChannel:
    """Synthesize a few-path surface-to-user channel (N-vector).

    Per-path magnitudes are fixed by the link distance; path phases and
    arrival angles are drawn from rng.
    """
    if num_paths < 1:
        raise ValueError("num_paths must be positive")
    n = irs_geometry.num_elements
    gains = np.empty(num_paths, dtype=complex)
    steering = np.empty((num_paths, n), dtype=complex)
    for i in range(num_paths):
        az, el = _random_angles(rng)
        steering[i] = steering_ura(irs_geometry, az, el)
        gains[i] = path_gain(model, distance, rng)
    scale = model.tx_gain * model.rx_gain
    vector = np.sqrt(n / num_paths) * scale * (gains @ steering)
    return MultipathChannel(vector, num_paths, gains, steering, scale)


def build_direct_bs_eve_channel(
    model: PathGainModel,
    bs_geometry: ArrayGeometry,
    distance: float,
    num_paths: int,
    rng: np.random.Generator,
) -> MultipathChannel:
    """Few-path direct transmitter-to-Eve channel (M-vector)."""
    if num_paths < 1:
        raise ValueError("num_paths must be positive")
    m = bs_geometry.num_elements
    gains = np.empty(num_paths, dtype=complex)
    steering = np.empty((num_paths, m), dtype=complex)
    for i in range(num_paths):
        angle = rng.uniform(-np.pi / 2, np.pi / 2)
        steering[i] = steering_ula(bs_geometry, angle)
        gains[i] = path_gain(model, distance, rng)
    scale = model.tx_gain * model.rx_gain
    vector = np.sqrt(m / num_paths) * scale * (gains @ steering)
    return MultipathChannel(vector, num_paths, gains, steering, scale)


def apply_blocking(
    channels: ChannelSet,
    scenario: ScenarioGeometry,
    model: PathGainModel | None = None,
) -> ChannelSet:
    """Split the blocked beam's power: sqrt(rho) to Eve, sqrt(1-rho) onward.

    irs_beam: Eve sits in the surface-to-Bob beam. Bob's vector is scaled by
    sqrt(1-rho); the stripped sqrt(rho) portion of his channel adds to Eve's.

    bs_beam: Eve sits in the transmitter-to-surface beam. The rank-one gain is
    scaled by sqrt(1-rho); Eve's direct channel gains a LoS component along
    the transmitter's surface-pointing steering vector at her distance, with
    a propagation-consistent deterministic phase. Needs model for the capture
    magnitude.
    """
    rho = scenario.blocking_fraction
    target = scenario.blocking_target
    if target == "none" or rho == 0.0:
        return channels
    if target == "irs_beam":
        g_bob = channels.irs_bob
        return ChannelSet(
            bs_irs=channels.bs_irs,
            irs_bob=np.sqrt(1.0 - rho) * g_bob,
            irs_eve=channels.irs_eve + np.sqrt(rho) * g_bob,
            bs_eve=channels.bs_eve,
        )
    # bs_beam
    if model is None:
        raise ValueError("bs_beam blocking needs the path-gain model")
    if channels.bs_eve is None:
        raise ValueError("bs_beam blocking needs a direct transmitter-Eve channel")
    ro = channels.bs_irs
    m = ro.bs_steering.size
    cap_mag = C_LIGHT / (4.0 * np.pi * model.carrier_frequency * scenario.d_se)
    cap_mag *= np.exp(-0.5 * model.absorption * scenario.d_se)
    # phase of the beam at Eve's position: the surface-link phase advanced by
    # the distance difference
    dphi = 2.0 * np.pi * model.carrier_frequency * (scenario.d_sr - scenario.d_se) / C_LIGHT
    cap_phase = np.angle(ro.gain) + dphi
    capture = (
        np.sqrt(m)
        * cap_mag
        * model.tx_gain
        * model.rx_gain
        * np.exp(1j * cap_phase)
        * ro.bs_steering
    )
    scaled = RankOneChannel(
        gain=np.sqrt(1.0 - rho) * ro.gain,
        irs_steering=ro.irs_steering,
        bs_steering=ro.bs_steering,
    )
    return ChannelSet(
        bs_irs=scaled,
        irs_bob=channels.irs_bob,
        irs_eve=channels.irs_eve,
        bs_eve=channels.bs_eve + np.sqrt(rho) * capture,
    )
