import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fppsla import oracle
from fppsla.fpcore import (
    build_surrogate_matrices,
    surrogate_beamforming_part,
    surrogate_value,
    theta_objective,
    update_alpha,
    update_beta,
    user_rate,
    w_objective,
    surrogate_weights,
    weighted_sum_rate,
)
from fppsla.model import effective_channels
from fppsla.verify import random_instance

from .conftest import cgauss


def params(weights, noise):
    return SimpleNamespace(weights=weights, noise_powers=noise)


def rate_by_hand(F, W, k, noise):
    """Term-by-term evaluation of the per-user rate with explicit loops."""
    L, K = W.shape
    gains = []
    for j in range(K):
        acc = 0j
        for l in range(L):
            acc += F[l, k].conjugate() * W[l, j]
        gains.append(abs(acc) ** 2)
    interference = sum(g for j, g in enumerate(gains) if j != k)
    return math.log(1 + gains[k] / (interference + noise), 2)


def test_rate_is_one_bit_at_unit_sinr():
    F = np.array([[1.0 + 0j]])
    W = np.array([[0.5j]])
    assert user_rate(F, W, 0, 0.25) == pytest.approx(1.0, abs=1e-15)


def test_rate_zero_beamformer():
    F = np.ones((2, 2), dtype=complex)
    W = np.array([[0, 1], [0, 1]], dtype=complex)
    assert user_rate(F, W, 0, 1.0) == 0.0


def test_rate_matches_term_by_term(rng):
    F, W = cgauss(rng, 4, 3), cgauss(rng, 4, 3)
    for k in range(3):
        assert user_rate(F, W, k, 0.3) == pytest.approx(rate_by_hand(F, W, k, 0.3), rel=1e-12)


def test_wsr_zero_weights(rng):
    F, W = cgauss(rng, 3, 2), cgauss(rng, 3, 2)
    assert weighted_sum_rate(F, W, params([0.0, 0.0], [1.0, 1.0])) == 0.0


def test_wsr_single_user(rng):
    F, W = cgauss(rng, 3, 1), cgauss(rng, 3, 1)
    assert weighted_sum_rate(F, W, params([1.0], [0.5])) == pytest.approx(user_rate(F, W, 0, 0.5), rel=1e-14)


def test_wsr_permutation_invariant(rng):
    F, W = cgauss(rng, 4, 4), cgauss(rng, 4, 4)
    weights = np.array([0.5, 1.0, 2.0, 3.0])
    noise = np.array([0.1, 0.2, 0.3, 0.4])
    perm = rng.permutation(4)
    a = weighted_sum_rate(F, W, params(weights, noise))
    b = weighted_sum_rate(F[:, perm], W[:, perm], params(weights[perm], noise[perm]))
    assert a == pytest.approx(b, rel=1e-13)


def test_alpha_zero_beamformer():
    F = np.ones((2, 2), dtype=complex)
    W = np.array([[0, 1], [0, 1]], dtype=complex)
    assert update_alpha(F, W, params([1, 1], [1, 1]))[0] == 0.0


def test_alpha_single_user():
    F = np.array([[1.0 + 0j]])
    W = np.array([[math.sqrt(2.0) * 1j]])
    assert update_alpha(F, W, params([1.0], [1.0]))[0] == pytest.approx(2.0, rel=1e-14)


def test_alpha_consistent_with_rate(instance):
    config, _, W, _, F, alpha, *_ = instance
    for k in range(3):
        assert math.log2(1 + alpha[k]) == pytest.approx(user_rate(F, W, k, config.noise_powers[k]), abs=1e-12)


def test_beta_zero_beamformers():
    F = np.ones((2, 2), dtype=complex)
    W = np.zeros((2, 2), dtype=complex)
    p = params([1, 1], [1, 1])
    assert np.all(update_beta(F, W, update_alpha(F, W, p), p) == 0)


def test_beta_scalar_channel():
    g, p, s2 = 0.8, 2.5, 0.3
    F = np.array([[math.sqrt(g) + 0j]])
    W = np.array([[math.sqrt(p) + 0j]])
    cfg = params([1.0], [s2])
    beta = update_beta(F, W, update_alpha(F, W, cfg), cfg)[0]
    assert beta == pytest.approx(math.sqrt(1 + g * p / s2) * math.sqrt(g * p) / (g * p + s2), rel=1e-14)


def test_surrogate_zero_auxiliaries(instance):
    config, _, W, _, F, *_ = instance
    assert surrogate_value(np.zeros(3), np.zeros(3), F, W, config) == 0.0


def test_surrogate_equals_wsr(instance):
    config, _, W, _, F, alpha, beta, _ = instance
    assert surrogate_value(alpha, beta, F, W, config) == pytest.approx(weighted_sum_rate(F, W, config), rel=1e-10)


def test_surrogate_below_wsr_elsewhere(instance, rng):
    config, _, W, _, F, alpha, beta, _ = instance
    wsr = weighted_sum_rate(F, W, config)
    for _ in range(200):
        a = np.maximum(alpha * np.exp(rng.normal(0, 0.5, 3)), 0)
        b = beta + 0.3 * np.abs(beta) * cgauss(rng, 3)
        assert surrogate_value(a, b, F, W, config) <= wsr + 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), snr=st.floats(-10, 30))
def test_surrogate_tight_property(seed, snr):
    config, _, W, _, F, alpha, beta, _ = random_instance(4, 3, 4, seed, snr_db=snr)
    wsr = weighted_sum_rate(F, W, config)
    assert surrogate_value(alpha, beta, F, W, config) == pytest.approx(wsr, rel=1e-10, abs=1e-13)


def test_surrogate_matrices_zero_w(instance):
    config, channels, W, _, F, alpha, beta, _ = instance
    mats = build_surrogate_matrices(channels, np.zeros_like(W), alpha, beta, config)
    assert not mats.M.any() and not mats.X.any()


def test_surrogate_matrices_zero_beta(instance):
    config, channels, W, _, F, alpha, _, _ = instance
    mats = build_surrogate_matrices(channels, W, alpha, np.zeros(3), config)
    assert not mats.M.any() and not mats.Y.any()
    assert not mats.Sigma1.any() and not mats.Sigma2.any()


def test_surrogate_matrices_hermitian_psd(instance):
    mats = instance[-1]
    for A in (mats.X, mats.Y):
        np.testing.assert_allclose(A, A.conj().T, atol=1e-10)
        assert np.linalg.eigvalsh(A).min() >= -1e-10
    assert np.all(mats.sigma2 >= 0)
    assert mats.Sigma1.shape == (3, 3) and np.count_nonzero(mats.Sigma1 - np.diag(np.diag(mats.Sigma1))) == 0


@pytest.mark.parametrize("seed", range(100))
def test_trace_form_equals_per_user_form(seed):
    # the trace objective equals the beamforming-dependent surrogate terms for any feasible Theta
    config, channels, W, _, _, alpha, beta, mats = random_instance(4, 3, 4, seed)
    Theta = oracle.random_feasible_theta(4, 1, seed + 1000)[0]
    F = effective_channels(channels, Theta)
    per_user = surrogate_beamforming_part(alpha, beta, F, W, config)
    assert theta_objective(Theta, mats) == pytest.approx(per_user, rel=1e-9, abs=1e-9)


def test_surrogate_value_decomposes(instance):
    config, _, W, _, F, alpha, beta, _ = instance
    const = sum(d * (-a + math.log1p(a) - abs(b) ** 2 * s) for d, a, b, s in zip(config.weights, alpha, beta, config.noise_powers))
    total = surrogate_beamforming_part(alpha, beta, F, W, config) + const
    assert surrogate_value(alpha, beta, F, W, config) == pytest.approx(total / math.log(2), rel=1e-12)


def test_w_objective_equals_surrogate_part(instance):
    config, _, W, _, F, alpha, beta, _ = instance
    s1, s2 = surrogate_weights(alpha, beta, config)
    assert w_objective(W, F, s1, s2) == pytest.approx(surrogate_beamforming_part(alpha, beta, F, W, config), rel=1e-12)
