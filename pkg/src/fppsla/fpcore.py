"""Rates, weighted sum rate and the fractional-programming surrogate.

Conventions
-----------
``F`` and ``W`` are L x K; column k of ``F`` is the effective channel
``f_k`` so that ``(F^H W)[k, j] = f_k^H w_j``.  Rates are in bit/s/Hz.

The linear-term weight ``Sigma1`` is stored with the conjugate of ``beta``,
``diag(delta_k sqrt(1 + alpha_k) conj(beta_k))``, which makes
``Re tr(Theta M)`` and ``Re tr(Sigma1 F^H W)`` equal to the per-user sum
``sum_k delta_k sqrt(1 + alpha_k) Re{conj(beta_k) f_k^H w_k}``.

The surrogate itself is built in nats, where the closed-form auxiliaries
are exact maximizers, and :func:`surrogate_value` converts it to bits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


def _weights_noise(config, K):
    weights = np.asarray(config.weights, dtype=float).reshape(-1)
    noise = np.asarray(config.noise_powers, dtype=float).reshape(-1)
    if weights.size != K or noise.size != K:
        raise DimensionError(f"config describes {weights.size} users, channels have {K}")
    return weights, noise


def gain_matrix(F, W):
    """``G[k, j] = f_k^H w_j``."""
    F = np.asarray(F)
    W = np.asarray(W)
    if F.shape != W.shape:
        raise DimensionError(f"F {F.shape} and W {W.shape} must both be L x K")
    return F.conj().T @ W


def sinr(F, W, noise_powers):
    G2 = np.abs(gain_matrix(F, W)) ** 2
    signal = np.diag(G2)
    interference = G2.sum(axis=1) - signal
    return signal / (interference + np.asarray(noise_powers, dtype=float))


def user_rate(F, W, k: int, noise_k: float) -> float:
    """Achievable rate of user ``k`` in bit/s/Hz."""
    F = np.asarray(F)
    W = np.asarray(W)
    fk_h = F[:, k].conj()
    g = np.abs(fk_h @ W) ** 2
    signal = g[k]
    interference = g.sum() - signal
    return float(np.log2(1.0 + signal / (interference + noise_k)))


def weighted_sum_rate(F, W, config) -> float:
    weights, noise = _weights_noise(config, np.shape(W)[1])
    return float(weights @ np.log2(1.0 + sinr(F, W, noise)))


def update_alpha(F, W, config) -> np.ndarray:
    """Optimal Lagrangian-dual auxiliaries: each user's SINR."""
    _, noise = _weights_noise(config, np.shape(W)[1])
    return sinr(F, W, noise)


def update_beta(F, W, alpha, config) -> np.ndarray:
    """Optimal quadratic-transform auxiliaries for fixed ``alpha``."""
    _, noise = _weights_noise(config, np.shape(W)[1])
    G = gain_matrix(F, W)
    total = (np.abs(G) ** 2).sum(axis=1) + noise
    return np.sqrt(1.0 + np.asarray(alpha, dtype=float)) * np.diag(G) / total


LN2 = np.log(2.0)


def surrogate_terms(alpha, beta, F, W, config):
    """Per-user surrogate ``h_k`` in nats, unweighted."""
    _, noise = _weights_noise(config, np.shape(W)[1])
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=complex)
    G = gain_matrix(F, W)
    total = (np.abs(G) ** 2).sum(axis=1) + noise
    return (
        2.0 * np.sqrt(1.0 + alpha) * np.real(beta.conj() * np.diag(G))
        - alpha
        - np.abs(beta) ** 2 * total
        + np.log1p(alpha)
    )


def surrogate_value(alpha, beta, F, W, config) -> float:
    """Weighted FP surrogate in bit/s/Hz.

    Equals the WSR at the optimal auxiliaries and lower-bounds it elsewhere.
    The ``-alpha + log(1 + alpha)`` offsets are kept even though they are
    constant inside each beamforming subproblem.
    """
    weights, _ = _weights_noise(config, np.shape(W)[1])
    return float(weights @ surrogate_terms(alpha, beta, F, W, config) / LN2)


def surrogate_beamforming_part(alpha, beta, F, W, config) -> float:
    """Terms of the surrogate that depend on ``W`` or ``Theta``, in nats.

    Equal to ``theta_objective`` and ``w_objective`` for the matching
    surrogate matrices.
    """
    weights, _ = _weights_noise(config, np.shape(W)[1])
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=complex)
    G = gain_matrix(F, W)
    linear = 2.0 * np.sqrt(1.0 + alpha) * np.real(beta.conj() * np.diag(G))
    quadratic = np.abs(beta) ** 2 * (np.abs(G) ** 2).sum(axis=1)
    return float(weights @ (linear - quadratic))


@dataclass(frozen=True)
class SurrogateMatrices:
    """Data of the passive-beamforming subproblem.

    ``sigma1`` and ``sigma2`` hold the diagonals of ``Sigma1`` and ``Sigma2``.
    """

    M: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray

    @property
    def Sigma1(self):
        return np.diag(self.sigma1)

    @property
    def Sigma2(self):
        return np.diag(self.sigma2)

    @property
    def N(self):
        return self.M.shape[0]


def surrogate_weights(alpha, beta, config):
    """Diagonals of ``Sigma1`` (complex) and ``Sigma2`` (real, >= 0)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=complex)
    weights, _ = _weights_noise(config, beta.size)
    sigma1 = weights * np.sqrt(1.0 + alpha) * beta.conj()
    sigma2 = weights * np.abs(beta) ** 2
    return sigma1, sigma2


def build_surrogate_matrices(channels, W, alpha, beta, config) -> SurrogateMatrices:
    W = np.asarray(W)
    H, E = channels.H, channels.E
    if W.shape != (E.shape[1], H.shape[1]):
        raise DimensionError(f"W has shape {W.shape}, expected {(E.shape[1], H.shape[1])}")
    sigma1, sigma2 = surrogate_weights(alpha, beta, config)
    EW = E @ W
    M = (EW * sigma1[None, :]) @ H.conj().T
    X = EW @ EW.conj().T
    Y = (H * sigma2[None, :]) @ H.conj().T
    # exact Hermitian symmetry for the eigensolvers downstream
    X = 0.5 * (X + X.conj().T)
    Y = 0.5 * (Y + Y.conj().T)
    return SurrogateMatrices(M=M, X=X, Y=Y, sigma1=sigma1, sigma2=sigma2)


def theta_objective(Theta, mats: SurrogateMatrices) -> float:
    """``2 Re tr(Theta M) - tr(Theta X Theta^H Y)``."""
    Theta = np.asarray(Theta)
    linear = 2.0 * np.real(np.sum(Theta * mats.M.T))
    TX = Theta @ mats.X
    quadratic = np.real(np.sum((TX @ Theta.conj().T) * mats.Y.T))
    return float(linear - quadratic)


def w_objective(W, F, sigma1, sigma2) -> float:
    """``2 Re tr(Sigma1 F^H W) - tr(W W^H F Sigma2 F^H)``."""
    G = gain_matrix(F, W)
    linear = 2.0 * np.real(np.asarray(sigma1) @ np.diag(G))
    quadratic = np.asarray(sigma2) @ (np.abs(G) ** 2).sum(axis=1)
    return float(linear - quadratic)
