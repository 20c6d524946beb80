"""Pure-Python reference kernels.

These are the fallback twins of the compiled kernels in ``_core``. Both
backends must produce bit-identical float64 results, so each loop below
fixes an exact operation order (initial value, ascending index, one
rounding per ``+``/``*``) that ``_core`` replicates. Keep the two files in
lockstep when changing either.
"""

import math

import numpy as np


def simulate_path(theta, x0, noise):
    """Roll the linear recursion forward one step per noise row.

    Returns a ``(T + 1, n)`` float64 array whose row 0 is ``x0``; row
    ``t + 1`` is ``theta @ row_t + noise[t]`` accumulated left to right.
    """
    th = [[float(v) for v in row] for row in theta]
    n = len(th)
    steps = noise.shape[0]
    noise_rows = noise.tolist()
    out = np.empty((steps + 1, n), dtype=np.float64)
    x = [float(v) for v in x0]
    out[0] = x
    for t in range(steps):
        w = noise_rows[t]
        nxt = [0.0] * n
        for i in range(n):
            acc = w[i]
            row = th[i]
            for j in range(n):
                acc = acc + row[j] * x[j]
            nxt[i] = acc
        x = nxt
        out[t + 1] = x
    return out


def ls_scan(states, horizons):
    """Accumulate lag-1 cross and Gram sums, snapshotting at each horizon.

    ``states`` is ``(T + 1, n)``; ``horizons`` is an increasing int64 array
    with values in ``[1, T]``. Returns ``(cross, gram)`` stacks of shape
    ``(k, n, n)`` where entry ``h`` holds the sums over ``t = 1..horizons[h]``
    of ``x_t x_{t-1}^T`` and ``x_{t-1} x_{t-1}^T`` respectively.
    """
    rows = states.tolist()
    n = len(rows[0])
    steps = len(rows) - 1
    marks = [int(h) for h in horizons]
    k = len(marks)
    cross_out = np.empty((k, n, n), dtype=np.float64)
    gram_out = np.empty((k, n, n), dtype=np.float64)
    cross = [[0.0] * n for _ in range(n)]
    gram = [[0.0] * n for _ in range(n)]
    hi = 0
    for t in range(1, steps + 1):
        prev = rows[t - 1]
        cur = rows[t]
        for i in range(n):
            ci = cross[i]
            gi = gram[i]
            a = cur[i]
            b = prev[i]
            for j in range(n):
                p = prev[j]
                ci[j] = ci[j] + a * p
                gi[j] = gi[j] + b * p
        if hi < k and t == marks[hi]:
            cross_out[hi] = cross
            gram_out[hi] = gram
            hi += 1
    return cross_out, gram_out


def dare_fixed_point(A, B, Q, R, tol, max_iter):
    """Iterate the Riccati map from ``P = Q`` until the update stalls.

    One sweep maps ``P`` to ``sym(A^T P A - A^T P B (R + B^T P B)^{-1}
    B^T P A + Q)``; the inner solve goes through an explicit Cholesky
    factorization. Stops when ``||P_next - P||_F <= tol * max(1, ||P||_F)``.

    Returns ``(P, iterations, status, last_step)`` with status 0 on
    convergence, 1 at the iteration cap, 2 when the inner factorization
    fails, 3 when iterates stop being finite.
    """
    a = A.tolist()
    b = B.tolist()
    q = Q.tolist()
    r = R.tolist()
    n = len(a)
    m = len(r)
    P = [row[:] for row in q]
    PA = [[0.0] * n for _ in range(n)]
    PB = [[0.0] * m for _ in range(n)]
    G = [[0.0] * m for _ in range(m)]
    L = [[0.0] * m for _ in range(m)]
    BtPA = [[0.0] * n for _ in range(m)]
    X = [[0.0] * n for _ in range(m)]
    AtPA = [[0.0] * n for _ in range(n)]
    Pn = [[0.0] * n for _ in range(n)]
    y = [0.0] * m
    status = 1
    iterations = 0
    diff = math.nan
    for it in range(1, max_iter + 1):
        iterations = it
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for k2 in range(n):
                    acc = acc + P[i][k2] * a[k2][j]
                PA[i][j] = acc
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k2 in range(n):
                    acc = acc + P[i][k2] * b[k2][j]
                PB[i][j] = acc
        for i in range(m):
            for j in range(m):
                acc = r[i][j]
                for k2 in range(n):
                    acc = acc + b[k2][i] * PB[k2][j]
                G[i][j] = acc
        for i in range(m):
            for j in range(i + 1, m):
                v = 0.5 * (G[i][j] + G[j][i])
                G[i][j] = v
                G[j][i] = v
        failed = False
        for j in range(m):
            acc = G[j][j]
            for k2 in range(j):
                acc = acc - L[j][k2] * L[j][k2]
            if not acc > 0.0:
                failed = True
                break
            L[j][j] = math.sqrt(acc)
            for i in range(j + 1, m):
                acc = G[i][j]
                for k2 in range(j):
                    acc = acc - L[i][k2] * L[j][k2]
                L[i][j] = acc / L[j][j]
        if failed:
            status = 2
            break
        for i in range(m):
            for j in range(n):
                acc = 0.0
                for k2 in range(n):
                    acc = acc + b[k2][i] * PA[k2][j]
                BtPA[i][j] = acc
        for j in range(n):
            for i in range(m):
                acc = BtPA[i][j]
                for k2 in range(i):
                    acc = acc - L[i][k2] * y[k2]
                y[i] = acc / L[i][i]
            for i in range(m - 1, -1, -1):
                acc = y[i]
                for k2 in range(i + 1, m):
                    acc = acc - L[k2][i] * X[k2][j]
                X[i][j] = acc / L[i][i]
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for k2 in range(n):
                    acc = acc + a[k2][i] * PA[k2][j]
                AtPA[i][j] = acc
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for k2 in range(m):
                    acc = acc + BtPA[k2][i] * X[k2][j]
                Pn[i][j] = AtPA[i][j] - acc + q[i][j]
        for i in range(n):
            for j in range(i + 1, n):
                v = 0.5 * (Pn[i][j] + Pn[j][i])
                Pn[i][j] = v
                Pn[j][i] = v
        d2 = 0.0
        b2 = 0.0
        for i in range(n):
            for j in range(n):
                e = Pn[i][j] - P[i][j]
                d2 = d2 + e * e
                b2 = b2 + P[i][j] * P[i][j]
        diff = math.sqrt(d2)
        base = math.sqrt(b2)
        for i in range(n):
            Pi = P[i]
            Pni = Pn[i]
            for j in range(n):
                Pi[j] = Pni[j]
        if not math.isfinite(diff):
            status = 3
            break
        scale = base if base > 1.0 else 1.0
        if diff <= tol * scale:
            status = 0
            break
    return np.array(P, dtype=np.float64), iterations, status, diff
