"""Transmit beamforming checks.

Covers:
  * matched-filter vector: basis-vector case, power budget, closed-form
    objective value, dominance over random feasible vectors
  * ratio-maximizing beamformer: collapse to matched filter when the
    eavesdropper vanishes, dominance over random feasible vectors, common
    rescaling invariance
  * steering dictionary: atom count, constant modulus, unit norm
  * greedy hybrid factorization: exact single-atom recovery, residual
    monotonicity in the chain count, power preservation, argument guards
"""

import numpy as np
import pytest

from irsec import (
    ArrayGeometry,
    gevd_beamformer,
    mrt_beamformer,
    omp_hybrid_decompose,
    steering_dictionary,
    steering_ula,
)


def _random_unit(rng, m):
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    return v / np.linalg.norm(v)


#### matched filter

def test_matched_filter_basis_vector():
    """b = e1, P = 4: the optimum is 2 e1."""
    b = np.zeros(4, dtype=complex)
    b[0] = 1.0
    w = mrt_beamformer(b, 4.0)
    assert np.allclose(w, 2.0 * b, atol=1e-15)


def test_matched_filter_power_and_objective():
    rng = np.random.default_rng(0)
    for _ in range(50):
        m = int(rng.integers(2, 33))
        b = rng.normal(size=m) + 1j * rng.normal(size=m)
        p = rng.uniform(0.5, 10.0)
        w = mrt_beamformer(b, p)
        assert abs(np.linalg.norm(w) ** 2 - p) <= 1e-12 * p
        # closed form |b^H w|^2 = P ||b||^2
        val = abs(b.conj() @ w) ** 2
        assert abs(val - p * np.linalg.norm(b) ** 2) <= 1e-10 * val


def test_matched_filter_dominates_random():
    """1000 random feasible vectors never beat the matched filter."""
    rng = np.random.default_rng(1)
    b = rng.normal(size=16) + 1j * rng.normal(size=16)
    p = 3.0
    w = mrt_beamformer(b, p)
    best = abs(b.conj() @ w) ** 2
    for _ in range(1000):
        cand = _random_unit(rng, 16) * np.sqrt(p * rng.uniform(0.0, 1.0))
        assert abs(b.conj() @ cand) ** 2 <= best + 1e-10 * best


def test_matched_filter_guards():
    with pytest.raises(ValueError):
        mrt_beamformer(np.ones(4, complex), 0.0)
    with pytest.raises(ValueError):
        mrt_beamformer(np.zeros(4, complex), 1.0)


#### ratio-maximizing beamformer

def test_ratio_beamformer_collapses_without_eavesdropper():
    """h_E = 0 reduces the ratio to the matched-filter problem."""
    rng = np.random.default_rng(2)
    h_b = rng.normal(size=8) + 1j * rng.normal(size=8)
    w = gevd_beamformer(h_b, np.zeros(8, complex), 2.0, 0.3, 0.3)
    w_mrt = mrt_beamformer(h_b, 2.0)
    # same direction up to a unit phase
    inner = abs(w.conj() @ w_mrt)
    assert abs(inner - np.linalg.norm(w) * np.linalg.norm(w_mrt)) <= 1e-9
    assert abs(np.linalg.norm(w) ** 2 - 2.0) <= 1e-12


def _link_ratio(w, h_b, h_e, nb, ne):
    return (nb + abs(h_b.conj() @ w) ** 2) / (ne + abs(h_e.conj() @ w) ** 2)


def test_ratio_beamformer_dominates_random():
    rng = np.random.default_rng(3)
    m, p, nb, ne = 8, 2.0, 0.05, 0.08
    h_b = rng.normal(size=m) + 1j * rng.normal(size=m)
    h_e = rng.normal(size=m) + 1j * rng.normal(size=m)
    w = gevd_beamformer(h_b, h_e, p, nb, ne)
    best = _link_ratio(w, h_b, h_e, nb, ne)
    assert best >= _link_ratio(mrt_beamformer(h_b, p), h_b, h_e, nb, ne) - 1e-10
    for _ in range(2000):
        cand = _random_unit(rng, m) * np.sqrt(p * rng.uniform(0.0, 1.0))
        assert _link_ratio(cand, h_b, h_e, nb, ne) <= best + 1e-8


def test_ratio_beamformer_rescale_invariance():
    """Scaling both channels by gamma leaves the chosen direction optimal."""
    rng = np.random.default_rng(4)
    h_b = rng.normal(size=6) + 1j * rng.normal(size=6)
    h_e = rng.normal(size=6) + 1j * rng.normal(size=6)
    w1 = gevd_beamformer(h_b, h_e, 1.5, 0.2, 0.4)
    w2 = gevd_beamformer(3.0 * h_b, 3.0 * h_e, 1.5, 9.0 * 0.2, 9.0 * 0.4)
    inner = abs(w1.conj() @ w2)
    assert abs(inner - np.linalg.norm(w1) * np.linalg.norm(w2)) <= 1e-8


def test_ratio_beamformer_guards():
    with pytest.raises(ValueError):
        gevd_beamformer(np.ones(4, complex), np.ones(4, complex), -1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        gevd_beamformer(np.ones(4, complex), np.ones(5, complex), 1.0, 1.0, 1.0)


#### steering dictionary and greedy factorization

def test_dictionary_shape_and_modulus():
    geom = ArrayGeometry.ula(16)
    d = steering_dictionary(geom)
    assert d.shape == (16, 32)  # default doubles the antenna count
    assert np.max(np.abs(np.abs(d) - 1.0 / 4.0)) <= 1e-12
    norms = np.linalg.norm(d, axis=0)
    assert np.max(np.abs(norms - 1.0)) <= 1e-12
    with pytest.raises(ValueError):
        steering_dictionary(ArrayGeometry.ura(4, 4))
    with pytest.raises(ValueError):
        steering_dictionary(geom, num_atoms=0)


def test_factorization_recovers_single_atom():
    """A scaled dictionary atom factors exactly with one chain."""
    geom = ArrayGeometry.ula(16)
    d = steering_dictionary(geom)
    w = (1.3 - 0.7j) * d[:, 11]
    sol = omp_hybrid_decompose(w, d, 1)
    err = np.linalg.norm(sol.hybrid() - w)
    assert err <= 1e-10 * np.linalg.norm(w)
    assert sol.analog.shape == (16, 1)
    assert np.allclose(sol.analog[:, 0], d[:, 11])


def test_factorization_error_monotone_in_chains():
    """More chains never worsen the least-squares reconstruction."""
    rng = np.random.default_rng(5)
    geom = ArrayGeometry.ula(16)
    d = steering_dictionary(geom)
    for _ in range(20):
        w = rng.normal(size=16) + 1j * rng.normal(size=16)
        errs = []
        for r in range(1, 7):
            sol = omp_hybrid_decompose(w, d, r)
            # measure before the final power rescale: raw LS residual
            basis = sol.analog
            f, *_ = np.linalg.lstsq(basis, w, rcond=None)
            errs.append(np.linalg.norm(w - basis @ f))
        assert all(a >= b - 1e-10 for a, b in zip(errs, errs[1:]))


def test_factorization_preserves_power():
    rng = np.random.default_rng(6)
    geom = ArrayGeometry.ula(16)
    d = steering_dictionary(geom)
    for r in (1, 4, 10):
        w = rng.normal(size=16) + 1j * rng.normal(size=16)
        sol = omp_hybrid_decompose(w, d, r)
        assert abs(np.linalg.norm(sol.hybrid()) - np.linalg.norm(w)) \
            <= 1e-12 * np.linalg.norm(w)
        assert abs(sol.power_budget - np.linalg.norm(w) ** 2) <= 1e-10


def test_factorization_on_grid_steering_is_exact():
    """A matched filter aimed at a grid angle reconstructs to round-off."""
    geom = ArrayGeometry.ula(16)
    d = steering_dictionary(geom)
    b = steering_ula(geom, float(np.arcsin(0.5)))  # u = 0.5 is on the 1/16 grid
    w = mrt_beamformer(b, 2.0)
    sol = omp_hybrid_decompose(w, d, 10)
    assert np.linalg.norm(sol.hybrid() - w) <= 1e-10 * np.linalg.norm(w)


def test_factorization_guards():
    geom = ArrayGeometry.ula(8)
    d = steering_dictionary(geom)
    w = np.ones(8, dtype=complex)
    with pytest.raises(ValueError):
        omp_hybrid_decompose(w, d, 0)
    with pytest.raises(ValueError):
        omp_hybrid_decompose(w, d, 17)  # more chains than atoms
    with pytest.raises(ValueError):
        omp_hybrid_decompose(np.ones(9, complex), d, 2)
