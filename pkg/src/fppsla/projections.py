"""Projections onto the feasible sets and the spectral shift."""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import ZeroProjectionError

RANK_RTOL = 1e-10
HERMITIAN_TOL = 1e-8
SYMMETRY_SLACK = 1e-12


def _svd(A):
    try:
        return scipy.linalg.svd(A, lapack_driver="gesdd", check_finite=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge where gesvd does not
        return scipy.linalg.svd(A, lapack_driver="gesvd", check_finite=False)


def project_symmetric_unitary(Z) -> np.ndarray:
    """Nearest symmetric unitary matrix to ``Z`` in Frobenius norm.

    With ``Z + Z^T = U S V^H`` of rank ``R``, the result is
    ``[U_R, conj(V_{N-R})] V^H``.  Singular values below ``1e-10 * s_max``
    count as zero; ``Z + Z^T = 0`` maps to the identity.
    """
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Z.shape}")
    if not np.all(np.isfinite(Z)):
        raise np.linalg.LinAlgError("projection of a non-finite matrix")
    n = Z.shape[0]
    Zs = Z + Z.T
    U, s, Vh = _svd(Zs)
    if s[0] == 0.0:
        return np.eye(n, dtype=complex)
    rank = int(np.count_nonzero(s > RANK_RTOL * s[0]))
    if rank < n:
        U = U.copy()
        U[:, rank:] = Vh[rank:, :].T  # conj(V_{N-R}) = (V^H rows)^T
    Q = U @ Vh
    if np.linalg.norm(Q - Q.T) > SYMMETRY_SLACK * n:
        Q = _resymmetrize(Q)
    return Q


def _resymmetrize(Q):
    # Singular vectors of tiny, closely spaced singular values are only
    # accurate to eps / gap, which shows up as asymmetry.  Symmetrize, then
    # restore unitarity with Newton polar steps (they preserve symmetry).
    Q = 0.5 * (Q + Q.T)
    eye = np.eye(Q.shape[0])
    for _ in range(6):
        Q = 0.5 * (Q + np.linalg.inv(Q).conj().T)
        Q = 0.5 * (Q + Q.T)
        if np.linalg.norm(Q @ Q.conj().T - eye) <= SYMMETRY_SLACK * Q.shape[0]:
            break
    return Q


def project_power_sphere(W, Pt: float) -> np.ndarray:
    """Scale ``W`` onto the sphere ``||W||_F^2 = Pt``."""
    W = np.asarray(W, dtype=complex)
    norm = np.linalg.norm(W)
    if norm == 0.0 or not np.isfinite(norm):
        raise ZeroProjectionError("cannot project a zero or non-finite matrix onto the power sphere")
    return (np.sqrt(Pt) / norm) * W


def spectral_shift(A) -> float:
    """Smallest ``rho`` with ``rho I - A`` PSD, i.e. the largest eigenvalue of ``A``."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    scale = np.abs(A).max(initial=0.0)
    if np.abs(A - A.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("spectral_shift needs a Hermitian matrix")
    if A.size == 0:
        return 0.0
    top = scipy.linalg.eigvalsh(
        0.5 * (A + A.conj().T), subset_by_index=[A.shape[0] - 1, A.shape[0] - 1], check_finite=False
    )
    return max(float(top[0]), 0.0)
