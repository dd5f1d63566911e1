"""Semidefinite relaxation of the discrete phase design.

Lifting v = e^{-j theta} to X ~ v v^H turns the secrecy-ratio maximization
into a linear-fractional semidefinite program; the scalar substitution
X -> mu * Phi with tr(R_eve X) = 1 makes it linear:

    max tr(R_bob X)   s.t.  tr(R_eve X) = 1,  X_nn = mu for all n,
                            X >= 0,  mu >= 0.

The solver is a compact primal-dual path-following interior-point method on
the real symmetric embedding of the complex problem (Nesterov-Todd scaling,
Mehrotra-style adaptive centering), sized for dense desk-scale instances.
Unit-modulus profiles are then recovered by Gaussian randomization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bcd import quantize_phase
from .secrecy import TWO_PI, CascadeVectors, DiscretePhaseSet, PhaseVector


class SdpSolverError(RuntimeError):
    """Interior-point failure; carries the last (primal, dual, gap) residuals."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class SdrMatrices:
    """Quadratic-form matrices of the lifted ratio objective.

    r_* = I/N + outer(c_*, conj(c_*)) / sigma_*^2, so that for unit-modulus
    v = e^{-j theta}: v^H r_* v = 1 + SNR_* -- the same numerator and
    denominator secrecy_ratio computes. A direct-link offset on Eve is
    outside this quadratic model and is not represented.
    """

    r_bob: np.ndarray
    r_eve: np.ndarray


@dataclass
class SdpSolution:
    x: np.ndarray                 # N x N complex Hermitian, PSD
    mu: float
    objective: float              # tr(r_bob @ x), the relaxed ratio value
    kkt_residuals: tuple[float, float, float]
    iterations: int


def build_sdr_matrices(cascades: CascadeVectors) -> SdrMatrices:
    n = cascades.bob.size
    eye = np.eye(n) / n
    r_bob = eye + np.outer(cascades.bob, cascades.bob.conj()) / cascades.noise_bob
    r_eve = eye + np.outer(cascades.eve, cascades.eve.conj()) / cascades.noise_eve
    return SdrMatrices(r_bob=r_bob, r_eve=r_eve)


def _embed(h: np.ndarray) -> np.ndarray:
    """Hermitian N x N -> symmetric 2N x 2N with the same spectrum (doubled)."""
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def _extract(z: np.ndarray, n: int) -> np.ndarray:
    """Inverse of _embed on the symmetric part; returns a Hermitian matrix."""
    p = z[:n, :n]
    r = z[n:, n:]
    q_up = z[:n, n:]
    q_lo = z[n:, :n]
    h = 0.5 * (p + r) + 0.5j * (q_lo - q_up)
    return 0.5 * (h + h.conj().T)


def _is_spd(mat: np.ndarray) -> bool:
    try:
        scipy.linalg.cholesky(mat, lower=True)
        return True
    except scipy.linalg.LinAlgError:
        return False


def solve_sdp(matrices: SdrMatrices, tolerance: float = 1e-8,
              max_iters: int = 100) -> SdpSolution:
    """Solve the lifted program to the requested relative KKT accuracy.

    Raises SdpSolverError if the iteration cap is hit before the primal
    residual, dual residual and duality gap all fall below tolerance.
    """
    # dividing both matrices by a common factor leaves the program unchanged
    # up to X -> X/beta (same objective, same X/mu), so normalize for
    # conditioning and scale the solution back at the end
    beta = float(np.linalg.norm(matrices.r_eve))
    if not np.isfinite(beta) or beta <= 0:
        raise ValueError("denominator quadratic form must be non-zero and finite")
    r_bob = 0.5 * (matrices.r_bob + matrices.r_bob.conj().T) / beta
    r_eve = 0.5 * (matrices.r_eve + matrices.r_eve.conj().T) / beta
    n = r_bob.shape[0]
    if r_bob.shape != (n, n) or r_eve.shape != (n, n):
        raise ValueError("quadratic-form matrices must be square and same size")
    d = 2 * n + 1   # real cone dimension: embedded X block plus the mu slot
    m = n + 1       # normalization constraint plus one per diagonal entry

    a_stack = np.zeros((m, d, d))
    b = np.zeros(m)
    a_stack[0, : 2 * n, : 2 * n] = _embed(r_eve)
    b[0] = 2.0      # embedding doubles traces: tr(R_eve X) = 1
    for k in range(n):
        a_stack[k + 1, k, k] = 1.0
        a_stack[k + 1, n + k, n + k] = 1.0
        a_stack[k + 1, 2 * n, 2 * n] = -2.0
    c_mat = np.zeros((d, d))
    c_mat[: 2 * n, : 2 * n] = -0.5 * _embed(r_bob)

    def op_a(z):
        return np.tensordot(a_stack, z, axes=([1, 2], [0, 1]))

    def op_at(y):
        return np.tensordot(y, a_stack, axes=(0, 0))

    # both starts are strictly feasible, so only the gap needs closing and
    # the usual infeasibility-versus-gap race cannot stall the iteration.
    # primal: a multiple of I meets every constraint; dual: y0 = -tau pulls
    # tau*R_eve above R_bob/2 on the X block while y_k = 1 keeps the mu slot
    # of the slack positive.
    x = np.eye(d) / float(np.trace(r_eve).real)
    lam_min_eve = float(scipy.linalg.eigvalsh(r_eve)[0])
    if lam_min_eve <= 0:
        raise ValueError("denominator quadratic form must be positive definite")
    tau = (0.5 * np.linalg.norm(r_bob, 2) + 2.0) / lam_min_eve
    y = np.ones(m)
    y[0] = -tau
    s = c_mat - np.tensordot(y, a_stack, axes=(0, 0))

    b_norm = 1.0 + np.linalg.norm(b)
    c_norm = 1.0 + np.linalg.norm(c_mat)
    eye_d = np.eye(d)

    def max_step(mat_chol, delta):
        """Largest alpha with mat + alpha*delta staying PSD (mat = L L^T)."""
        half = scipy.linalg.solve_triangular(mat_chol, delta, lower=True)
        sym = scipy.linalg.solve_triangular(mat_chol, half.T, lower=True)
        lam_min = float(np.min(scipy.linalg.eigvalsh(0.5 * (sym + sym.T))))
        if lam_min >= -1e-16:
            return 1.0
        return min(1.0, -0.98 / lam_min)

    rel_p = rel_d = rel_g = np.inf
    iterations = 0
    for it in range(max_iters):
        iterations = it
        rp = b - op_a(x)
        rd = c_mat - s - op_at(y)
        pobj = float(np.sum(c_mat * x))
        dobj = float(b @ y)
        gap = float(np.sum(x * s))
        rel_p = float(np.linalg.norm(rp)) / b_norm
        rel_d = float(np.linalg.norm(rd)) / c_norm
        rel_g = gap / (1.0 + abs(pobj) + abs(dobj))
        if max(rel_p, rel_d, rel_g) <= tolerance:
            x_c = _extract(x[: 2 * n, : 2 * n], n)
            # tr(r_bob_scaled x_scaled) already equals the original objective
            objective = float(np.trace(r_bob @ x_c).real)
            return SdpSolution(
                x=x_c / beta,
                mu=float(x[2 * n, 2 * n]) / beta,
                objective=objective,
                kkt_residuals=(rel_p, rel_d, rel_g),
                iterations=it,
            )

        try:
            lx = scipy.linalg.cholesky(x, lower=True)
            ls = scipy.linalg.cholesky(s, lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise SdpSolverError(
                f"iterate left the cone at iteration {it}",
                residuals=(rel_p, rel_d, rel_g),
            ) from exc

        # Nesterov-Todd scaling point W = G G^T with W S W = X
        u_sv, sig, vt = scipy.linalg.svd(ls.T @ lx)
        g_fac = lx @ vt.T / np.sqrt(sig)
        w_nt = g_fac @ g_fac.T
        s_inv = scipy.linalg.cho_solve((ls, True), eye_d)
        s_inv = 0.5 * (s_inv + s_inv.T)

        waw = np.einsum("ab,kbc,cd->kad", w_nt, a_stack, w_nt, optimize=True)
        schur = np.tensordot(a_stack, waw, axes=([1, 2], [1, 2]))
        schur = 0.5 * (schur + schur.T)
        try:
            schur_fac = scipy.linalg.cho_factor(schur)
        except scipy.linalg.LinAlgError as exc:
            raise SdpSolverError(
                f"singular Schur complement at iteration {it}",
                residuals=(rel_p, rel_d, rel_g),
            ) from exc

        a_wrdw = op_a(w_nt @ rd @ w_nt)
        mu_bar = gap / d

        def directions(sigma):
            rcomp = sigma * mu_bar * s_inv - x
            dy = scipy.linalg.cho_solve(schur_fac, a_wrdw - op_a(rcomp) + rp)
            ds = rd - op_at(dy)
            dx = rcomp - w_nt @ ds @ w_nt
            return 0.5 * (dx + dx.T), dy, 0.5 * (ds + ds.T)

        # predictor: affine direction sets the adaptive centering weight
        dx_a, _, ds_a = directions(0.0)
        ap_a = max_step(lx, dx_a)
        ad_a = max_step(ls, ds_a)
        gap_aff = float(np.sum((x + ap_a * dx_a) * (s + ad_a * ds_a)))
        sigma = float(np.clip((max(gap_aff, 0.0) / gap) ** 3, 1e-8, 0.99))

        dx, dy, ds = directions(sigma)
        ap = max_step(lx, dx)
        ad = max_step(ls, ds)
        # the eigenvalue bound is computed in the scaled metric; roundoff can
        # still push the stepped iterate marginally outside the cone, so
        # backtrack until an actual factorization succeeds
        for _ in range(60):
            if _is_spd(x + ap * dx):
                break
            ap *= 0.5
        for _ in range(60):
            if _is_spd(s + ad * ds):
                break
            ad *= 0.5
        x = x + ap * dx
        y = y + ad * dy
        s = s + ad * ds

    raise SdpSolverError(
        f"no convergence in {max_iters} iterations "
        f"(residuals p={rel_p:.2e} d={rel_d:.2e} gap={rel_g:.2e})",
        residuals=(rel_p, rel_d, rel_g),
    )


def _quadratic_ratio(v: np.ndarray, matrices: SdrMatrices) -> float:
    num = float((v.conj() @ matrices.r_bob @ v).real)
    den = float((v.conj() @ matrices.r_eve @ v).real)
    return num / den


def gaussian_randomize(solution: SdpSolution, matrices: SdrMatrices,
                       num_samples: int, rng: np.random.Generator
                       ) -> tuple[PhaseVector, float]:
    """Recover a unit-modulus profile from the lifted solution.

    If X/mu is numerically rank one its principal eigenvector is projected
    directly; otherwise num_samples Gaussian draws with covariance X/mu are
    projected and the best exact ratio wins (ties keep the earliest draw).
    """
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    if solution.mu <= 0:
        raise SdpSolverError("lifted solution has non-positive scale mu")
    phi = solution.x / solution.mu
    phi = 0.5 * (phi + phi.conj().T)
    lam, vecs = scipy.linalg.eigh(phi)
    lam = np.clip(lam, 0.0, None)
    if lam[-1] <= 0.0:
        raise SdpSolverError("lifted solution is numerically zero")
    if lam.size == 1 or lam[-2] / lam[-1] < 1e-6:
        z = vecs[:, -1]
        v = np.exp(1j * np.angle(z))
        thetas = np.mod(-np.angle(z), TWO_PI)
        return PhaseVector(thetas), _quadratic_ratio(v, matrices)
    half = vecs * np.sqrt(lam)
    n = phi.shape[0]
    # one batched draw walks the stream exactly like per-sample draws would,
    # so a longer run sees a shorter run's candidates as a prefix
    draws = rng.standard_normal((num_samples, 2, n))
    z = ((draws[:, 0, :] + 1j * draws[:, 1, :]) / np.sqrt(2.0)) @ half.T
    v = np.exp(1j * np.angle(z))
    num = np.einsum("si,ij,sj->s", v.conj(), matrices.r_bob, v, optimize=True).real
    den = np.einsum("si,ij,sj->s", v.conj(), matrices.r_eve, v, optimize=True).real
    objs = num / den
    best = int(np.argmax(objs))   # ties keep the earliest draw
    return PhaseVector(np.mod(-np.angle(z[best]), TWO_PI)), float(objs[best])


def sdp_pipeline(cascades: CascadeVectors, phase_set: DiscretePhaseSet,
                 num_samples: int = 100,
                 rng: np.random.Generator | None = None,
                 tolerance: float = 1e-8) -> PhaseVector:
    """Relax, solve, randomize, then snap each phase to the discrete grid."""
    if rng is None:
        rng = np.random.default_rng(0)
    matrices = build_sdr_matrices(cascades)
    solution = solve_sdp(matrices, tolerance=tolerance)
    relaxed, _ = gaussian_randomize(solution, matrices, num_samples, rng)
    thetas = np.array([quantize_phase(t, phase_set) for t in relaxed.thetas])
    return PhaseVector(thetas, phase_set)
