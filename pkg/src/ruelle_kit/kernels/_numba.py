"""numba implementations of the hot loops.

Row-parallel kernels use ``prange`` over independent rows only, so results do
not depend on the thread count.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def horner3(c, z):
    # value, first and second derivative of sum c[k] z**k
    n = c.shape[0]
    p = c[n - 1]
    dp = 0j
    ddp = 0j
    for k in range(n - 2, -1, -1):
        ddp = ddp * z + 2.0 * dp
        dp = dp * z + p
        p = p * z + c[k]
    return p, dp, ddp


@njit(cache=True)
def rat_eval(num, den, z):
    p, dp, ddp = horner3(num, z)
    q, dq, ddq = horner3(den, z)
    if q == 0:
        # numba raises on complex division by zero; report a pole instead
        return complex(np.inf, 0.0), complex(np.nan, np.nan), complex(np.nan, np.nan)
    w = dp * q - p * dq
    r = p / q
    r1 = w / (q * q)
    r2 = (ddp * q - p * ddq) / (q * q) - 2.0 * dq * w / (q * q * q)
    return r, r1, r2


@njit(cache=True)
def compensated_sum(values):
    # Neumaier summation, real and imaginary parts separately, fixed order
    sr = 0.0
    cr = 0.0
    si = 0.0
    ci = 0.0
    for k in range(values.shape[0]):
        x = values[k].real
        t = sr + x
        if abs(sr) >= abs(x):
            cr += (sr - t) + x
        else:
            cr += (x - t) + sr
        sr = t
        y = values[k].imag
        t = si + y
        if abs(si) >= abs(y):
            ci += (si - t) + y
        else:
            ci += (y - t) + si
        si = t
    return complex(sr + cr, si + ci)


@njit(cache=True, parallel=True)
def rational_jet(num, den, zs):
    m = zs.shape[0]
    r = np.empty(m, np.complex128)
    r1 = np.empty(m, np.complex128)
    r2 = np.empty(m, np.complex128)
    for i in prange(m):
        r[i], r1[i], r2[i] = rat_eval(num, den, zs[i])
    return r, r1, r2


@njit(cache=True, parallel=True)
def iterate_jet(num, den, zs, n):
    m = zs.shape[0]
    out = np.empty(m, np.complex128)
    out1 = np.empty(m, np.complex128)
    out2 = np.empty(m, np.complex128)
    for i in prange(m):
        z = zs[i]
        d1 = 1.0 + 0j
        d2 = 0j
        for _ in range(n):
            r, r1, r2 = rat_eval(num, den, z)
            d2 = r2 * d1 * d1 + r1 * d2
            d1 = r1 * d1
            z = r
        out[i] = z
        out1[i] = d1
        out2[i] = d2
    return out, out1, out2


@njit(cache=True)
def orbit(num, den, z0, n, escape):
    pts = np.empty(n + 1, np.complex128)
    dps = np.empty(n + 1, np.complex128)
    pts[0] = z0
    dps[0] = 1.0 + 0j
    z = z0
    d = 1.0 + 0j
    for j in range(n):
        r, r1, _ = rat_eval(num, den, z)
        d = d * r1
        z = r
        pts[j + 1] = z
        dps[j + 1] = d
        if not (np.isfinite(z.real) and np.isfinite(z.imag)) or abs(z) > escape:
            return pts[: j + 2], dps[: j + 2], True
    return pts, dps, False


@njit(cache=True)
def _root_radius(c):
    deg = c.shape[0] - 1
    lead = abs(c[deg])
    rad = 0.0
    for k in range(1, deg + 1):
        v = (abs(c[deg - k]) / lead) ** (1.0 / k)
        if v > rad:
            rad = v
    return 2.0 * rad


@njit(cache=True)
def _aberth_row(c, z, tol, maxiter):
    deg = c.shape[0] - 1
    rad = _root_radius(c)
    center = -c[deg - 1] / (deg * c[deg])
    spread = rad + abs(center)
    if spread == 0.0:
        for k in range(deg):
            z[k] = 0j
        return 0
    for k in range(deg):
        ang = 2.0 * np.pi * k / deg + 0.7
        z[k] = center + rad * complex(np.cos(ang), np.sin(ang))
    floor = tol * spread
    for it in range(maxiter):
        done = True
        for k in range(deg):
            p, dp, _ = horner3(c, z[k])
            if p == 0:
                continue
            s = 0j
            for j in range(deg):
                if j != k:
                    s += 1.0 / (z[k] - z[j])
            den = dp - p * s
            if den == 0:
                w = p * 1e-3 + 1e-8 * spread
            else:
                w = p / den
            z[k] -= w
            if abs(w) > tol * abs(z[k]) + floor:
                done = False
        if done:
            return it + 1
    return maxiter


@njit(cache=True, parallel=True)
def aberth_batch(rows, tol, maxiter):
    m = rows.shape[0]
    deg = rows.shape[1] - 1
    roots = np.empty((m, deg), np.complex128)
    iters = np.empty(m, np.int64)
    for i in prange(m):
        iters[i] = _aberth_row(rows[i], roots[i], tol, maxiter)
    return roots, iters
