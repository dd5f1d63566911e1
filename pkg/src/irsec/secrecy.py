"""Secrecy-rate bookkeeping: cascade vectors, phase profiles, rate formulas.

The reflecting surface applies e^{j theta_i} per element. With a fixed
transmit vector w the per-element cascades fold channel and beamformer into
one complex weight per element, so every optimizer works on

    ratio(theta) = (1 + |sum_i e^{j theta_i} c_bob_i|^2 / sigma_bob^2)
                 / (1 + |sum_i e^{j theta_i} c_eve_i + off|^2 / sigma_eve^2)

and the secrecy rate is max(0, log2(ratio)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DiscretePhaseSet:
    """The feasible phases {0, step, ..., (levels-1)*step}, step = 2 pi / levels."""

    num_levels: int

    def __post_init__(self):
        if self.num_levels < 2:
            raise ValueError("num_levels must be at least 2")

    @property
    def step(self) -> float:
        return TWO_PI / self.num_levels

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.num_levels) * self.step


@dataclass
class PhaseVector:
    """Per-element phases in [0, 2 pi); phase_set is None for continuous."""

    thetas: np.ndarray
    phase_set: DiscretePhaseSet | None = None

    def __post_init__(self):
        self.thetas = np.mod(np.asarray(self.thetas, dtype=float), TWO_PI)
        if self.phase_set is not None:
            step = self.phase_set.step
            offs = np.abs(self.thetas / step - np.round(self.thetas / step))
            if np.any(offs * step > 1e-9):
                raise ValueError("discrete phase vector has off-grid entries")

    @property
    def is_discrete(self) -> bool:
        return self.phase_set is not None

    def unit(self) -> np.ndarray:
        """Element-wise e^{j theta}."""
        return np.exp(1j * self.thetas)


@dataclass
class CascadeVectors:
    """Per-element cascaded weights for Bob and Eve, plus noise powers.

    eve_offset is a phase-independent additive term on Eve's effective gain
    (nonzero only when Eve also has a direct transmitter link).
    """

    bob: np.ndarray
    eve: np.ndarray
    noise_bob: float
    noise_eve: float
    eve_offset: complex = 0.0

    def __post_init__(self):
        if self.bob.shape != self.eve.shape:
            raise ValueError("cascade vectors must have equal length")
        if self.noise_bob <= 0 or self.noise_eve <= 0:
            raise ValueError("noise powers must be positive")


def effective_gain(phase: PhaseVector, cascade: np.ndarray) -> complex:
    """sum_i e^{j theta_i} * cascade_i."""
    if phase.thetas.shape != cascade.shape:
        raise ValueError("phase and cascade dimension mismatch")
    return complex(phase.unit() @ cascade)


def secrecy_ratio(phase: PhaseVector, cascades: CascadeVectors) -> float:
    """(1 + SNR_bob) / (1 + SNR_eve); the optimizers' raw objective."""
    e_bob = effective_gain(phase, cascades.bob)
    e_eve = effective_gain(phase, cascades.eve) + cascades.eve_offset
    num = 1.0 + abs(e_bob) ** 2 / cascades.noise_bob
    den = 1.0 + abs(e_eve) ** 2 / cascades.noise_eve
    return num / den


def secrecy_rate(phase: PhaseVector, cascades: CascadeVectors) -> float:
    """Clipped log-ratio, bits/s/Hz: max(0, log2(secrecy_ratio))."""
    return max(0.0, float(np.log2(secrecy_ratio(phase, cascades))))


def build_cascades(channels: ChannelSet, w: np.ndarray, noise_bob: float,
                   noise_eve: float) -> CascadeVectors:
    """Fold channels and the transmit vector into per-element cascades.

    cascade_k_i = conj(g_k_i) * (H^H w)_i, with the rank-one H^H this is
    conj(g_k_i) * gain * a_i * (b^H w). A direct transmitter-Eve channel
    contributes the scalar offset h^H w.
    """
    ro = channels.bs_irs
    hw = ro.gain * ro.irs_steering * (ro.bs_steering.conj() @ w)
    if hw.shape != channels.irs_bob.shape:
        raise ValueError("channel dimensions disagree")
    bob = channels.irs_bob.conj() * hw
    eve = channels.irs_eve.conj() * hw
    offset = 0.0 + 0.0j
    if channels.bs_eve is not None:
        offset = complex(channels.bs_eve.conj() @ w)
    return CascadeVectors(bob=bob, eve=eve, noise_bob=noise_bob,
                          noise_eve=noise_eve, eve_offset=offset)
