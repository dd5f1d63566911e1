"""Transmit beamforming: matched filter, generalized-eigenvector design,
and a greedy hybrid (analog/digital) decomposition.

Under the rank-one transmitter-surface channel every receiver-side quantity
depends on w only through b^H w, so the full-power matched filter
w = sqrt(P) b / ||b|| is optimal regardless of the surface phases. When Eve
also has a direct transmitter link the optimal w maximizes a ratio of two
quadratic forms, solved by a generalized eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channel import ArrayGeometry, steering_ula


@dataclass
class BeamformerSolution:
    """Digital vector plus its analog/baseband factorization."""

    digital: np.ndarray        # M
    analog: np.ndarray         # M x R, constant-modulus entries 1/sqrt(M)
    baseband: np.ndarray       # R
    power_budget: float

    def hybrid(self) -> np.ndarray:
        return self.analog @ self.baseband


def mrt_beamformer(bs_steering: np.ndarray, power: float) -> np.ndarray:
    """Full-power matched filter sqrt(P) b / ||b||."""
    if power <= 0:
        raise ValueError("power must be positive")
    nrm = np.linalg.norm(bs_steering)
    if nrm == 0:
        raise ValueError("steering vector is zero")
    return np.sqrt(power) * bs_steering / nrm

def gevd_beamformer(h_bob: np.ndarray, h_eve: np.ndarray, power: float,
                    noise_bob: float, noise_eve: float) -> np.ndarray:
    """Maximize (sigma_b^2 + |h_b^H w|^2) / (sigma_e^2 + |h_e^H w|^2), ||w||^2 <= P.

    Solution: sqrt(P) times the unit principal generalized eigenvector of the
    pair (sigma_b^2/P I + h_b h_b^H, sigma_e^2/P I + h_e h_e^H).
    """
    if power <= 0:
        raise ValueError("power must be positive")
    if h_bob.shape != h_eve.shape:
        raise ValueError("channel dimension mismatch")
    m = h_bob.size
    r_bob = (noise_bob / power) * np.eye(m) + np.outer(h_bob, h_bob.conj())
    r_eve = (noise_eve / power) * np.eye(m) + np.outer(h_eve, h_eve.conj())
    # generalized Hermitian eigenproblem, whitened internally by Cholesky
    _, vecs = scipy.linalg.eigh(r_bob, r_eve)
    w = vecs[:, -1]
    return np.sqrt(power) * w / np.linalg.norm(w)


def steering_dictionary(geometry: ArrayGeometry, num_atoms: int | None = None) -> np.ndarray:
    """M x K dictionary of ULA steering atoms on a uniform sin-angle grid.

    Defaults to K = 2 M atoms; each atom has constant-modulus entries 1/sqrt(M).
    """
    if geometry.kind != "ula":
        raise ValueError("steering_dictionary needs a ULA geometry")
    m = geometry.num_elements
    k = 2 * m if num_atoms is None else num_atoms
    if k < 1:
        raise ValueError("num_atoms must be positive")
    atoms = np.empty((m, k), dtype=complex)
    for j in range(k):
        u = -1.0 + 2.0 * j / k
        atoms[:, j] = steering_ula(geometry, float(np.arcsin(u)))
    return atoms


def omp_hybrid_decompose(w: np.ndarray, dictionary: np.ndarray,
                         num_chains: int) -> BeamformerSolution:
    """Greedy analog/baseband factorization of a digital beamformer.

    Repeats num_chains times: pick the unused atom best correlated with the
    residual, refit the baseband by least squares, update the residual. The
    baseband is finally rescaled so ||F_RF f_BB|| = ||w||.
    """
    m, k = dictionary.shape
    if w.size != m:
        raise ValueError("beamformer and dictionary dimension mismatch")
    if not 1 <= num_chains <= k:
        raise ValueError("num_chains must be in [1, num_atoms]")
    selected: list[int] = []
    residual = w.astype(complex)
    f_bb = np.zeros(0, dtype=complex)
    for _ in range(num_chains):
        corr = np.abs(dictionary.conj().T @ residual)
        corr[selected] = -1.0  # atoms are used at most once
        best = int(np.argmax(corr))
        selected.append(best)
        basis = dictionary[:, selected]
        f_bb, *_ = np.linalg.lstsq(basis, w, rcond=None)
        residual = w - basis @ f_bb
    analog = dictionary[:, selected]
    recon = analog @ f_bb
    nrm = np.linalg.norm(recon)
    if nrm > 0:
        f_bb = f_bb * (np.linalg.norm(w) / nrm)
    return BeamformerSolution(
        digital=w,
        analog=analog,
        baseband=f_bb,
        power_budget=float(np.linalg.norm(w) ** 2),
    )
