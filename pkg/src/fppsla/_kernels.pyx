# cython: language_level=3
"""Compiled brute-force evaluators used by the oracle.

Every routine is a plain element-wise loop over a batch of candidate
matrices; no trace identities are used.
"""
import numpy as np

cimport numpy as cnp

cnp.import_array()


def theta_objective_batch(const double complex[:, :, ::1] T,
                          const double complex[:, ::1] M,
                          const double complex[:, ::1] X,
                          const double complex[:, ::1] Y):
    cdef Py_ssize_t n = T.shape[0], N = T.shape[1]
    cdef Py_ssize_t s, i, j, k, l
    cdef double complex acc, lin
    cdef double quad
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef double complex[:, ::1] TX = np.empty((N, N), dtype=np.complex128)
    cdef double complex[:, ::1] C = np.empty((N, N), dtype=np.complex128)
    for s in range(n):
        lin = 0
        for i in range(N):
            for j in range(N):
                lin = lin + T[s, i, j] * M[j, i]
        for i in range(N):
            for k in range(N):
                acc = 0
                for j in range(N):
                    acc = acc + T[s, i, j] * X[j, k]
                TX[i, k] = acc
        for i in range(N):
            for l in range(N):
                acc = 0
                for k in range(N):
                    acc = acc + TX[i, k] * T[s, l, k].conjugate()
                C[i, l] = acc
        quad = 0.0
        for i in range(N):
            for l in range(N):
                quad = quad + (C[i, l] * Y[l, i]).real
        res[s] = 2.0 * lin.real - quad
    return out


def frobenius_distance_batch(const double complex[:, :, ::1] Q, const double complex[:, ::1] Z):
    cdef Py_ssize_t n = Q.shape[0], N = Q.shape[1], P = Q.shape[2]
    cdef Py_ssize_t s, i, j
    cdef double complex d
    cdef double acc
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    for s in range(n):
        acc = 0.0
        for i in range(N):
            for j in range(P):
                d = Q[s, i, j] - Z[i, j]
                acc = acc + d.real * d.real + d.imag * d.imag
        res[s] = acc ** 0.5
    return out


def w_objective_batch(const double complex[:, :, ::1] Ws,
                      const double complex[:, ::1] F,
                      const double complex[::1] sigma1,
                      const double[::1] sigma2):
    cdef Py_ssize_t n = Ws.shape[0], L = Ws.shape[1], K = Ws.shape[2]
    cdef Py_ssize_t s, k, j, l
    cdef double complex g
    cdef double total, power
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    for s in range(n):
        total = 0.0
        for k in range(K):
            power = 0.0
            for j in range(K):
                g = 0
                for l in range(L):
                    g = g + F[l, k].conjugate() * Ws[s, l, j]
                power = power + g.real * g.real + g.imag * g.imag
                if j == k:
                    total = total + 2.0 * (sigma1[k] * g).real
            total = total - sigma2[k] * power
        res[s] = total
    return out


def single_user_gain_batch(const double complex[:, :, ::1] T,
                           const double complex[::1] h,
                           const double complex[:, ::1] E):
    cdef Py_ssize_t n = T.shape[0], N = T.shape[1], L = E.shape[1]
    cdef Py_ssize_t s, i, j, l
    cdef double complex acc
    cdef double total
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    cdef double complex[::1] u = np.empty(N, dtype=np.complex128)
    for s in range(n):
        for j in range(N):
            acc = 0
            for i in range(N):
                acc = acc + h[i].conjugate() * T[s, i, j]
            u[j] = acc
        total = 0.0
        for l in range(L):
            acc = 0
            for j in range(N):
                acc = acc + u[j] * E[j, l]
            total = total + acc.real * acc.real + acc.imag * acc.imag
        res[s] = total
    return out
