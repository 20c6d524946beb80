# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled twins of the kernels in ``pure``.

Operation order matches ``pure`` exactly (same initial values, same
ascending-index accumulation, one rounding per op) and the build disables
FP contraction, so both backends return bit-identical float64 results.
Keep the two files in lockstep when changing either.
"""

import numpy as np

from libc.math cimport isfinite, sqrt


def simulate_path(const double[:, ::1] theta, const double[::1] x0, const double[:, ::1] noise):
    """Roll the linear recursion forward one step per noise row."""
    cdef Py_ssize_t n = theta.shape[0]
    cdef Py_ssize_t steps = noise.shape[0]
    out = np.empty((steps + 1, n), dtype=np.float64)
    cdef double[:, ::1] s = out
    cdef Py_ssize_t t, i, j
    cdef double acc
    with nogil:
        for i in range(n):
            s[0, i] = x0[i]
        for t in range(steps):
            for i in range(n):
                acc = noise[t, i]
                for j in range(n):
                    acc = acc + theta[i, j] * s[t, j]
                s[t + 1, i] = acc
    return out


def ls_scan(const double[:, ::1] states, const long long[::1] horizons):
    """Accumulate lag-1 cross and Gram sums, snapshotting at each horizon."""
    cdef Py_ssize_t n = states.shape[1]
    cdef Py_ssize_t steps = states.shape[0] - 1
    cdef Py_ssize_t k = horizons.shape[0]
    cross_out = np.empty((k, n, n), dtype=np.float64)
    gram_out = np.empty((k, n, n), dtype=np.float64)
    work = np.zeros((2, n, n), dtype=np.float64)
    cdef double[:, :, ::1] co = cross_out
    cdef double[:, :, ::1] go = gram_out
    cdef double[:, :, ::1] w = work
    cdef Py_ssize_t t, i, j, hi = 0
    cdef double a, b, p
    with nogil:
        for t in range(1, steps + 1):
            for i in range(n):
                a = states[t, i]
                b = states[t - 1, i]
                for j in range(n):
                    p = states[t - 1, j]
                    w[0, i, j] = w[0, i, j] + a * p
                    w[1, i, j] = w[1, i, j] + b * p
            if hi < k and t == horizons[hi]:
                for i in range(n):
                    for j in range(n):
                        co[hi, i, j] = w[0, i, j]
                        go[hi, i, j] = w[1, i, j]
                hi += 1
    return cross_out, gram_out


def dare_fixed_point(const double[:, ::1] A, const double[:, ::1] B, const double[:, ::1] Q,
                     const double[:, ::1] R, double tol, long long max_iter):
    """Iterate the Riccati map from ``P = Q`` until the update stalls."""
    cdef Py_ssize_t n = A.shape[0]
    cdef Py_ssize_t m = R.shape[0]
    P_arr = np.array(Q, dtype=np.float64, copy=True)
    cdef double[:, ::1] P = P_arr
    cdef double[:, ::1] PA = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] PB = np.zeros((n, m), dtype=np.float64)
    cdef double[:, ::1] G = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] L = np.zeros((m, m), dtype=np.float64)
    cdef double[:, ::1] BtPA = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] X = np.zeros((m, n), dtype=np.float64)
    cdef double[:, ::1] AtPA = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] Pn = np.zeros((n, n), dtype=np.float64)
    cdef double[::1] y = np.zeros(m, dtype=np.float64)
    cdef long long status = 1
    cdef long long iterations = 0
    cdef long long it
    cdef Py_ssize_t i, j, k2
    cdef double acc, v, e, d2, b2, diff, base, scale
    cdef bint failed
    diff = float("nan")
    with nogil:
        for it in range(1, max_iter + 1):
            iterations = it
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for k2 in range(n):
                        acc = acc + P[i, k2] * A[k2, j]
                    PA[i, j] = acc
            for i in range(n):
                for j in range(m):
                    acc = 0.0
                    for k2 in range(n):
                        acc = acc + P[i, k2] * B[k2, j]
                    PB[i, j] = acc
            for i in range(m):
                for j in range(m):
                    acc = R[i, j]
                    for k2 in range(n):
                        acc = acc + B[k2, i] * PB[k2, j]
                    G[i, j] = acc
            for i in range(m):
                for j in range(i + 1, m):
                    v = 0.5 * (G[i, j] + G[j, i])
                    G[i, j] = v
                    G[j, i] = v
            failed = False
            for j in range(m):
                acc = G[j, j]
                for k2 in range(j):
                    acc = acc - L[j, k2] * L[j, k2]
                if not acc > 0.0:
                    failed = True
                    break
                L[j, j] = sqrt(acc)
                for i in range(j + 1, m):
                    acc = G[i, j]
                    for k2 in range(j):
                        acc = acc - L[i, k2] * L[j, k2]
                    L[i, j] = acc / L[j, j]
            if failed:
                status = 2
                break
            for i in range(m):
                for j in range(n):
                    acc = 0.0
                    for k2 in range(n):
                        acc = acc + B[k2, i] * PA[k2, j]
                    BtPA[i, j] = acc
            for j in range(n):
                for i in range(m):
                    acc = BtPA[i, j]
                    for k2 in range(i):
                        acc = acc - L[i, k2] * y[k2]
                    y[i] = acc / L[i, i]
                for i in range(m - 1, -1, -1):
                    acc = y[i]
                    for k2 in range(i + 1, m):
                        acc = acc - L[k2, i] * X[k2, j]
                    X[i, j] = acc / L[i, i]
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for k2 in range(n):
                        acc = acc + A[k2, i] * PA[k2, j]
                    AtPA[i, j] = acc
            for i in range(n):
                for j in range(n):
                    acc = 0.0
                    for k2 in range(m):
                        acc = acc + BtPA[k2, i] * X[k2, j]
                    Pn[i, j] = AtPA[i, j] - acc + Q[i, j]
            for i in range(n):
                for j in range(i + 1, n):
                    v = 0.5 * (Pn[i, j] + Pn[j, i])
                    Pn[i, j] = v
                    Pn[j, i] = v
            d2 = 0.0
            b2 = 0.0
            for i in range(n):
                for j in range(n):
                    e = Pn[i, j] - P[i, j]
                    d2 = d2 + e * e
                    b2 = b2 + P[i, j] * P[i, j]
            diff = sqrt(d2)
            base = sqrt(b2)
            for i in range(n):
                for j in range(n):
                    P[i, j] = Pn[i, j]
            if not isfinite(diff):
                status = 3
                break
            scale = base if base > 1.0 else 1.0
            if diff <= tol * scale:
                status = 0
                break
    return P_arr, int(iterations), int(status), diff
