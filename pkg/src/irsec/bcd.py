"""Element-wise block coordinate descent over the surface phases.

With every other element frozen, the secrecy ratio as a function of one
phase theta_i is a ratio of two shifted cosines,

    f(theta) = (c_b + d_b cos(theta + p_b)) / (c_e + d_e cos(theta + p_e)),

whose global maximizer has a closed form. Sweeping elements with that update
never decreases the objective; a quantized sweep keeps a candidate only when
it strictly improves, which preserves monotonicity on the discrete grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet
from .secrecy import (
    TWO_PI,
    CascadeVectors,
    DiscretePhaseSet,
    PhaseVector,
    build_cascades,
)


@dataclass(frozen=True)
class ElementCoefficients:
    """Shifted-cosine coefficients of one element's objective.

    c_* = 1 + (|x|^2 + |S|^2) / sigma^2,  d_* = 2 |x| |S| / sigma^2,
    p_* = angle(x * conj(S)), where x is the element's cascade weight and S
    the frozen remainder. Always c_* > d_* >= 0.
    """

    c_bob: float
    c_eve: float
    d_bob: float
    d_eve: float
    p_bob: float
    p_eve: float


def _coeffs_from_parts(x_bob, rest_bob, x_eve, rest_eve, noise_bob, noise_eve):
    return ElementCoefficients(
        c_bob=1.0 + (abs(x_bob) ** 2 + abs(rest_bob) ** 2) / noise_bob,
        c_eve=1.0 + (abs(x_eve) ** 2 + abs(rest_eve) ** 2) / noise_eve,
        d_bob=2.0 * abs(x_bob) * abs(rest_bob) / noise_bob,
        d_eve=2.0 * abs(x_eve) * abs(rest_eve) / noise_eve,
        p_bob=float(np.angle(x_bob * np.conj(rest_bob))),
        p_eve=float(np.angle(x_eve * np.conj(rest_eve))),
    )


def element_coefficients(i: int, phase: PhaseVector,
                         cascades: CascadeVectors) -> ElementCoefficients:
    """Coefficients of element i's objective at the current phase profile."""
    n = cascades.bob.size
    if not 0 <= i < n:
        raise ValueError(f"element index {i} out of range for {n} elements")
    unit = phase.unit()
    rest_bob = unit @ cascades.bob - unit[i] * cascades.bob[i]
    rest_eve = unit @ cascades.eve - unit[i] * cascades.eve[i] + cascades.eve_offset
    return _coeffs_from_parts(cascades.bob[i], rest_bob, cascades.eve[i], rest_eve,
                              cascades.noise_bob, cascades.noise_eve)


def element_objective(theta: float, coeffs: ElementCoefficients) -> float:
    """f(theta) for one element; equals the full secrecy ratio at that theta."""
    num = coeffs.c_bob + coeffs.d_bob * np.cos(theta + coeffs.p_bob)
    den = coeffs.c_eve + coeffs.d_eve * np.cos(theta + coeffs.p_eve)
    return float(num / den)


def bcd_phase_update(coeffs: ElementCoefficients) -> float | None:
    """Closed-form global maximizer of the shifted-cosine ratio.

    The derivative is proportional to A sin(theta) + B cos(theta) + C; the
    maximizer is the down-crossing of that sinusoid. Returns None when the
    objective is constant in theta (caller keeps the current phase).
    """
    a = coeffs.c_bob * coeffs.d_eve * np.cos(coeffs.p_eve) \
        - coeffs.c_eve * coeffs.d_bob * np.cos(coeffs.p_bob)
    b = coeffs.c_bob * coeffs.d_eve * np.sin(coeffs.p_eve) \
        - coeffs.c_eve * coeffs.d_bob * np.sin(coeffs.p_bob)
    c = coeffs.d_bob * coeffs.d_eve * np.sin(coeffs.p_eve - coeffs.p_bob)
    amp = np.hypot(a, b)
    scale = coeffs.c_bob * coeffs.d_eve + coeffs.c_eve * coeffs.d_bob
    if scale == 0.0 or amp <= 1e-14 * scale:
        return None
    s = np.clip(-c / amp, -1.0, 1.0)
    theta = np.pi - np.arctan2(b, a) - np.arcsin(s)
    return float(np.mod(theta, TWO_PI))


def quantize_phase(theta: float, phase_set: DiscretePhaseSet) -> float:
    """Nearest feasible phase in chord distance; ties go to the smaller value."""
    vals = phase_set.values
    dist = np.abs(np.mod(theta - vals + np.pi, TWO_PI) - np.pi)
    return float(vals[int(np.argmin(dist))])


def bob_aligned_init(cascades: CascadeVectors,
                     phase_set: DiscretePhaseSet | None = None) -> PhaseVector:
    """Co-phase Bob's cascade: theta_i = -angle(cascade_bob_i), grid-snapped."""
    thetas = np.mod(-np.angle(cascades.bob), TWO_PI)
    if phase_set is not None:
        thetas = np.array([quantize_phase(t, phase_set) for t in thetas])
    return PhaseVector(thetas, phase_set)


def zero_init(n: int, phase_set: DiscretePhaseSet | None = None) -> PhaseVector:
    return PhaseVector(np.zeros(n), phase_set)


@dataclass
class BcdState:
    """Result of a coordinate-descent run."""

    phase: PhaseVector
    objective_history: np.ndarray   # ratio after init and after each sweep
    iterations: int                 # full sweeps executed
    converged: bool
    update_history: np.ndarray | None = None  # ratio after every element update


def _ratio(sum_bob, sum_eve, noise_bob, noise_eve):
    return (1.0 + abs(sum_bob) ** 2 / noise_bob) / (1.0 + abs(sum_eve) ** 2 / noise_eve)


def run_bcd_on_cascades(cascades: CascadeVectors,
                        phase_set: DiscretePhaseSet | None = None,
                        init: PhaseVector | None = None,
                        epsilon: float = 1e-4,
                        max_iters: int = 100,
                        track_updates: bool = False) -> BcdState:
    """Sweep elements with the closed-form update until the profile settles.

    Stops when the Euclidean distance between consecutive e^{j theta}
    profiles drops to epsilon, or after max_iters sweeps. With a phase_set
    the candidate is grid-snapped and kept only if it strictly improves.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    n = cascades.bob.size
    if init is None:
        init = bob_aligned_init(cascades, phase_set)
    if init.thetas.size != n:
        raise ValueError("init length does not match cascade length")
    if phase_set is not None and init.phase_set != phase_set:
        raise ValueError("init is not on the requested phase grid")

    nb, ne = cascades.noise_bob, cascades.noise_eve
    casc_bob, casc_eve = cascades.bob, cascades.eve
    thetas = init.thetas.copy()
    unit = np.exp(1j * thetas)
    updates: list[float] | None = [] if track_updates else None

    sum_bob = unit @ casc_bob
    sum_eve = unit @ casc_eve + cascades.eve_offset
    history = [_ratio(sum_bob, sum_eve, nb, ne)]

    converged = False
    sweeps = 0
    for _ in range(max_iters):
        sweeps += 1
        prev_unit = unit.copy()
        # resync the running sums once per sweep to bound rounding drift
        sum_bob = unit @ casc_bob
        sum_eve = unit @ casc_eve + cascades.eve_offset
        for i in range(n):
            x_bob = casc_bob[i]
            x_eve = casc_eve[i]
            rest_bob = sum_bob - unit[i] * x_bob
            rest_eve = sum_eve - unit[i] * x_eve
            coeffs = _coeffs_from_parts(x_bob, rest_bob, x_eve, rest_eve, nb, ne)
            cand = bcd_phase_update(coeffs)
            if cand is not None:
                if phase_set is not None:
                    cand = quantize_phase(cand, phase_set)
                    cand_unit = np.exp(1j * cand)
                    cur = _ratio(rest_bob + unit[i] * x_bob,
                                 rest_eve + unit[i] * x_eve, nb, ne)
                    new = _ratio(rest_bob + cand_unit * x_bob,
                                 rest_eve + cand_unit * x_eve, nb, ne)
                    accept = new > cur
                else:
                    cand_unit = np.exp(1j * cand)
                    accept = True
                if accept:
                    thetas[i] = cand
                    unit[i] = cand_unit
                    sum_bob = rest_bob + unit[i] * x_bob
                    sum_eve = rest_eve + unit[i] * x_eve
            if updates is not None:
                updates.append(_ratio(sum_bob, sum_eve, nb, ne))
        history.append(_ratio(sum_bob, sum_eve, nb, ne))
        if np.linalg.norm(unit - prev_unit) <= epsilon:
            converged = True
            break

    return BcdState(
        phase=PhaseVector(thetas, phase_set),
        objective_history=np.asarray(history),
        iterations=sweeps,
        converged=converged,
        update_history=None if updates is None else np.asarray(updates),
    )


def run_bcd(channels: ChannelSet, w: np.ndarray, noise_bob: float, noise_eve: float,
            phase_set: DiscretePhaseSet | None = None,
            init: PhaseVector | None = None,
            epsilon: float = 1e-4,
            max_iters: int = 100,
            track_updates: bool = False) -> BcdState:
    """Convenience wrapper: builds cascades from channels and w, then sweeps."""
    cascades = build_cascades(channels, w, noise_bob, noise_eve)
    return run_bcd_on_cascades(cascades, phase_set=phase_set, init=init,
                               epsilon=epsilon, max_iters=max_iters,
                               track_updates=track_updates)
