"""Kernel dispatch: the compiled extension when available, else NumPy.

Set ``FPPSLA_PURE_PYTHON=1`` to force the NumPy fallback.
"""
import os

import numpy as np

from . import _kernels_py as python_impl

compiled_impl = None
if not os.environ.get("FPPSLA_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_impl
    except ImportError:
        compiled_impl = None

_impl = compiled_impl or python_impl
BACKEND = "cython" if compiled_impl is not None else "python"


def _c(a, ndim):
    a = np.ascontiguousarray(a, dtype=np.complex128)
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-D array, got shape {a.shape}")
    return a


def theta_objective_batch(T, M, X, Y):
    """``2 Re tr(T M) - tr(T X T^H Y)`` for each ``T`` in the batch."""
    return _impl.theta_objective_batch(_c(T, 3), _c(M, 2), _c(X, 2), _c(Y, 2))


def frobenius_distance_batch(Q, Z):
    return _impl.frobenius_distance_batch(_c(Q, 3), _c(Z, 2))


def w_objective_batch(Ws, F, sigma1, sigma2):
    return _impl.w_objective_batch(
        _c(Ws, 3), _c(F, 2), _c(sigma1, 1), np.ascontiguousarray(sigma2, dtype=np.float64)
    )


def single_user_gain_batch(T, h, E):
    """``||E^H T^H h||^2`` for each ``T``."""
    return _impl.single_user_gain_batch(_c(T, 3), _c(h, 1), _c(E, 2))
