"""NumPy implementations of the oracle kernels (fallback for ``_kernels``)."""
import numpy as np


def theta_objective_batch(T, M, X, Y):
    lin = np.einsum("sij,ji->s", T, M)
    C = np.einsum("sik,kj,slj->sil", T, X, T.conj(), optimize=True)
    quad = np.einsum("sil,li->s", C, Y).real
    return 2.0 * lin.real - quad


def frobenius_distance_batch(Q, Z):
    D = Q - Z[None]
    return np.sqrt(np.einsum("sij,sij->s", D.real, D.real) + np.einsum("sij,sij->s", D.imag, D.imag))


def w_objective_batch(Ws, F, sigma1, sigma2):
    G = np.einsum("lk,slj->skj", F.conj(), Ws)
    linear = 2.0 * np.real(np.einsum("k,skk->s", sigma1, G))
    power = (G.real**2 + G.imag**2).sum(axis=2)
    return linear - power @ sigma2


def single_user_gain_batch(T, h, E):
    u = np.einsum("i,sij->sj", h.conj(), T)
    g = u @ E
    return (g.real**2 + g.imag**2).sum(axis=1)
