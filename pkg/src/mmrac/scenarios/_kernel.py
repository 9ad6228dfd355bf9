"""Compiled vector field of the stacked closed loop.

State layout: ``[x_p, x_m, X (n*m), T (n*m, adaptive only), k or a (m)]``.
The control input is computed here for the estimator-driven kinds and passed
in (``u_in``) otherwise; ``has_k`` / ``has_a`` say whether the trailing block
holds a direct-control gain or the convex-weight estimate.
"""

import numpy as np
from numba import njit

DIRECT, INDIRECT, ODE, EXTERNAL = 0, 1, 2, 3


@njit(cache=True)
def stacked_rhs(z, theta_p, r, u_in, noise, theta_m, thetas0, Pb,
                gain, alpha_gain, m, n, kind, adaptive, has_k, has_a):
    dz = np.empty_like(z)
    off_x = 2 * m
    off_t = off_x + n * m
    off_extra = off_t + n * m if adaptive else off_t

    def theta(i, j):
        if adaptive:
            return z[off_t + i * m + j]
        return thetas0[i, j]

    u = u_in
    if kind == DIRECT:
        u = r
        for j in range(m):
            u += z[off_extra + j] * z[j]
    elif kind == INDIRECT:
        u = r
        for j in range(m):
            u += (theta_m[j] - theta(0, j)) * z[j]
    elif kind == ODE:
        last = 1.0
        for i in range(m):
            last -= z[off_extra + i]
        u = r
        for j in range(m):
            est = last * theta(n - 1, j)
            for i in range(m):
                est += z[off_extra + i] * theta(i, j)
            u += (theta_m[j] - est) * z[j]

    # plant and reference model
    tp = 0.0
    tm = 0.0
    for j in range(m):
        tp += theta_p[j] * z[j]
        tm += theta_m[j] * z[m + j]
    for j in range(m - 1):
        dz[j] = z[j + 1]
        dz[m + j] = z[m + j + 1]
    dz[m - 1] = tp + u
    dz[2 * m - 1] = tm + r

    # identification models and their parameters
    for i in range(n):
        base = off_x + i * m
        acc = u
        for j in range(m):
            acc += theta_m[j] * z[base + j] + (theta(i, j) - theta_m[j]) * z[j]
        for j in range(m - 1):
            dz[base + j] = z[base + j + 1]
        dz[base + m - 1] = acc
        if adaptive:
            s = 0.0
            for j in range(m):
                s += (z[base + j] - z[j] - noise[j]) * Pb[j]
            for j in range(m):
                dz[off_t + i * m + j] = -gain * s * z[j]

    if has_k:
        s = 0.0
        for j in range(m):
            s += (z[j] + noise[j] - z[m + j]) * Pb[j]
        for j in range(m):
            dz[off_extra + j] = -gain * s * z[j]
    if has_a:
        # D = E^T (rows x_i - x_last); da = -g * D (D^T a + e_last)
        last = off_x + (n - 1) * m
        v = np.empty(m)
        for j in range(m):
            v[j] = z[last + j] - z[j] - noise[j]
        for i in range(m):
            for j in range(m):
                v[j] += z[off_extra + i] * (z[off_x + i * m + j] - z[last + j])
        for i in range(m):
            s = 0.0
            for j in range(m):
                s += (z[off_x + i * m + j] - z[last + j]) * v[j]
            dz[off_extra + i] = -alpha_gain * s
    return dz
