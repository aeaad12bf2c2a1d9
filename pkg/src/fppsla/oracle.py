"""Independent brute-force verifiers.

Nothing here calls into the solver, the projections or the fp-core
objective code; feasible points are produced by an eigen-decomposition
polar factor rather than an SVD, and objectives are evaluated by the
element-wise kernels in :mod:`fppsla.kernels`.
"""
from __future__ import annotations

import logging
import math

import numpy as np

from . import kernels

log = logging.getLogger(__name__)


def _gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def _polar_symmetric(G):
    """Unitary polar factor of ``G + G^T`` (batched), via ``(S^H S)^(-1/2)``."""
    S = G + np.swapaxes(G, -1, -2)
    lam, V = np.linalg.eigh(np.conj(np.swapaxes(S, -1, -2)) @ S)
    inv_sqrt = V * (1.0 / np.sqrt(lam))[..., None, :]
    P = S @ (inv_sqrt @ np.conj(np.swapaxes(V, -1, -2)))
    return 0.5 * (P + np.swapaxes(P, -1, -2))


def haar_unitary(n, count, rng):
    Q, R = np.linalg.qr(_gaussian(rng, (count, n, n)))
    d = np.diagonal(R, axis1=-2, axis2=-1)
    return Q * (d / np.abs(d))[..., None, :]


def random_feasible_theta(N, count, rng=None) -> np.ndarray:
    """``count`` random symmetric unitary N x N matrices, shape (count, N, N).

    Half are polar factors of symmetrized Gaussian matrices; the other half
    are those factors under random unitary congruences ``Q Theta Q^T``.
    """
    rng = np.random.default_rng(rng)
    if N < 1:
        raise ValueError("N must be >= 1")
    out = _polar_symmetric(_gaussian(rng, (count, N, N)))
    half = count // 2
    if half:
        Q = haar_unitary(N, half, rng)
        out[half:2 * half] = Q @ out[half:2 * half] @ np.swapaxes(Q, -1, -2)
    return out


def iter_feasible_theta(N, count, rng=None, chunk=20000):
    """Yield ``count`` feasible samples in chunks of at most ``chunk``."""
    rng = np.random.default_rng(rng)
    remaining = count
    while remaining > 0:
        size = min(chunk, remaining)
        yield random_feasible_theta(N, size, rng)
        remaining -= size


def random_sphere_points(L, K, Pt, count, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    W = _gaussian(rng, (count, L, K))
    norms = np.sqrt((np.abs(W) ** 2).sum(axis=(1, 2)))
    return W * (math.sqrt(Pt) / norms)[:, None, None]


def naive_theta_objective(Theta, M, X, Y) -> float:
    """Element-wise ``2 Re tr(Theta M) - tr(Theta X Theta^H Y)`` for one matrix."""
    return float(kernels.theta_objective_batch(np.asarray(Theta)[None], M, X, Y)[0])


def brute_force_theta_objective(mats, samples):
    """Best ``(value, Theta)`` of the passive-beamforming objective over ``samples``.

    ``samples`` may be an array of shape (n, N, N) or an iterable of such
    chunks.
    """
    if isinstance(samples, np.ndarray):
        samples = [samples]
    best_value, best_theta = -np.inf, None
    for chunk in samples:
        values = kernels.theta_objective_batch(chunk, mats.M, mats.X, mats.Y)
        i = int(np.argmax(values))
        if values[i] > best_value:
            best_value, best_theta = float(values[i]), np.array(chunk[i])
    return best_value, best_theta


def brute_force_w_objective(F, sigma1, sigma2, samples):
    """Best ``(value, W)`` of the active-beamforming objective over ``samples``."""
    values = kernels.w_objective_batch(samples, F, sigma1, sigma2)
    i = int(np.argmax(values))
    return float(values[i]), np.array(samples[i])


def naive_matmul(A, B):
    A = np.asarray(A)
    B = np.asarray(B)
    n, m = A.shape
    p = B.shape[1]
    out = np.zeros((n, p), dtype=np.result_type(A, B))
    for i in range(n):
        for j in range(p):
            acc = 0j
            for k in range(m):
                acc += A[i, k] * B[k, j]
            out[i, j] = acc
    return out


def single_user_bound(channels, config) -> float:
    """``log2(1 + Pt ||h||^2 s_max(E)^2 / sigma^2)`` for a single-user system."""
    if channels.K != 1:
        raise ValueError(f"single_user_bound needs K = 1, got K = {channels.K}")
    h = channels.H[:, 0]
    E = channels.E
    # largest singular value from the Gram matrix, independent of the SVD route
    s_max_sq = float(np.linalg.eigvalsh(E.conj().T @ E)[-1])
    gain = float(np.real(np.vdot(h, h)))
    return math.log2(1.0 + config.Pt * gain * s_max_sq / config.noise_powers[0])


def single_user_rate_for_theta(channels, config, Theta) -> float:
    """Rate with MRT at full power for a given ``Theta`` (K = 1)."""
    h = channels.H[:, 0]
    gain = kernels.single_user_gain_batch(np.asarray(Theta)[None], h, channels.E)[0]
    return math.log2(1.0 + config.Pt * gain / config.noise_powers[0])


def search_single_user_gain(channels, count, rng=None, chunk=20000, refine_steps=0, refine_scale=0.05):
    """Largest ``||E^H Theta^H h||^2`` found by random search.

    ``refine_steps`` > 0 adds a random-perturbation hill climb from the best
    sample: candidates ``Q Theta Q^T`` with ``Q`` near the identity.
    Returns ``(gain, Theta)``.
    """
    rng = np.random.default_rng(rng)
    h = channels.H[:, 0]
    E = channels.E
    N = channels.N
    best, best_theta = -np.inf, None
    for batch in iter_feasible_theta(N, count, rng, chunk):
        g = kernels.single_user_gain_batch(batch, h, E)
        i = int(np.argmax(g))
        if g[i] > best:
            best, best_theta = float(g[i]), np.array(batch[i])
    scale = refine_scale
    for _ in range(refine_steps):
        K = _gaussian(rng, (256, N, N)) * scale
        K = 0.5 * (K + np.conj(np.swapaxes(K, -1, -2)))
        Q = _cayley(1j * K)
        cand = Q @ best_theta @ np.swapaxes(Q, -1, -2)
        g = kernels.single_user_gain_batch(cand, h, E)
        i = int(np.argmax(g))
        if g[i] > best:
            best, best_theta = float(g[i]), cand[i]
        else:
            scale *= 0.7
    return best, best_theta


def _cayley(S):
    """Unitary ``(I - S/2)^-1 (I + S/2)`` for skew-Hermitian ``S`` (batched)."""
    eye = np.eye(S.shape[-1])
    return np.linalg.solve(eye - 0.5 * S, eye + 0.5 * S)


def minorizer_gap(A, B, Theta, Phi) -> float:
    """``tr(T A T^H B) - [2 Re tr(P A T^H B) - tr(P A P^H B)]``, computed naively."""
    A, B, Theta, Phi = (np.asarray(x, dtype=complex) for x in (A, B, Theta, Phi))
    lhs = _naive_trace_product(Theta, A, Theta, B)
    cross = _naive_trace_product(Phi, A, Theta, B)
    base = _naive_trace_product(Phi, A, Phi, B)
    return float(np.real(lhs) - (2.0 * np.real(cross) - np.real(base)))


def _naive_trace_product(P, A, T, B):
    """``tr(P A T^H B)`` as an explicit quadruple sum."""
    return np.einsum("ij,jk,lk,li->", P, A, T.conj(), B)


def finite_difference_check(objective, point, direction, step, slope) -> float:
    """Relative gap between ``slope`` and a central difference of ``objective``.

    ``slope`` is the claimed directional derivative at ``point`` along
    ``direction`` (a number, or a callable ``slope(point, direction)``).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    point = np.asarray(point)
    direction = np.asarray(direction)
    if callable(slope):
        slope = slope(point, direction)
    fd = (objective(point + step * direction) - objective(point - step * direction)) / (2.0 * step)
    scale = max(abs(slope), abs(fd), np.finfo(float).tiny)
    return abs(fd - slope) / scale


def shifted_theta_objective(M, X, Y, rho):
    """True shifted objective ``2 Re tr(T M) + tr(T X T^H (rho I - Y))``."""
    B = rho * np.eye(Y.shape[0]) - Y

    def f(T):
        return float(np.real(2.0 * np.einsum("ij,ji->", T, M)) + np.real(_naive_trace_product(T, X, T, B)))

    return f


def linearized_theta_surrogate(M, X, Y, rho, Phi):
    """Linearization of the shifted objective at ``Phi``, as a function of ``T``."""
    B = rho * np.eye(Y.shape[0]) - Y
    Phi = np.asarray(Phi)
    const = np.real(_naive_trace_product(Phi, X, Phi, B))

    def g(T):
        return float(
            np.real(2.0 * np.einsum("ij,ji->", T, M))
            + 2.0 * np.real(_naive_trace_product(Phi, X, T, B))
            - const
        )

    return g


def tangent_direction(Theta, rng=None):
    """Random tangent of the symmetric unitary manifold at ``Theta``: ``i(S Theta + Theta S^T)``."""
    rng = np.random.default_rng(rng)
    N = Theta.shape[0]
    S = _gaussian(rng, (N, N))
    S = 0.5 * (S + S.conj().T)
    D = 1j * (S @ Theta + Theta @ S.T)
    return D / np.linalg.norm(D)
