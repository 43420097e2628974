"""Pure numpy implementations; same contracts as the numba kernels."""

import math

import numpy as np


def horner3(c, z):
    z = np.asarray(z, dtype=np.complex128)
    p = np.full(z.shape, c[-1], dtype=np.complex128)
    dp = np.zeros_like(p)
    ddp = np.zeros_like(p)
    for k in range(len(c) - 2, -1, -1):
        ddp = ddp * z + 2.0 * dp
        dp = dp * z + p
        p = p * z + c[k]
    return p, dp, ddp


def rat_eval(num, den, z):
    with np.errstate(all="ignore"):
        p, dp, ddp = horner3(num, z)
        q, dq, ddq = horner3(den, z)
        w = dp * q - p * dq
        r = p / q
        r1 = w / (q * q)
        r2 = (ddp * q - p * ddq) / (q * q) - 2.0 * dq * w / (q * q * q)
    return r, r1, r2


def compensated_sum(values):
    values = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def rational_jet(num, den, zs):
    return rat_eval(num, den, zs)


def iterate_jet(num, den, zs, n):
    z = np.array(zs, dtype=np.complex128)
    d1 = np.ones_like(z)
    d2 = np.zeros_like(z)
    with np.errstate(all="ignore"):
        for _ in range(n):
            r, r1, r2 = rat_eval(num, den, z)
            d2 = r2 * d1 * d1 + r1 * d2
            d1 = r1 * d1
            z = r
    return z, d1, d2


def orbit(num, den, z0, n, escape):
    pts = np.empty(n + 1, np.complex128)
    dps = np.empty(n + 1, np.complex128)
    pts[0] = z0
    dps[0] = 1.0
    z = complex(z0)
    d = 1.0 + 0j
    for j in range(n):
        r, r1, _ = rat_eval(num, den, z)
        d = d * complex(r1)
        z = complex(r)
        pts[j + 1] = z
        dps[j + 1] = d
        if not np.isfinite(z) or abs(z) > escape:
            return pts[: j + 2], dps[: j + 2], True
    return pts, dps, False


def aberth_batch(rows, tol, maxiter):
    # Jacobi-style Ehrlich-Aberth over all rows at once
    rows = np.asarray(rows, dtype=np.complex128)
    m, n1 = rows.shape
    deg = n1 - 1
    lead = rows[:, -1]
    ks = np.arange(1, deg + 1)
    with np.errstate(divide="ignore"):
        ratios = np.abs(rows[:, deg - ks]) / np.abs(lead)[:, None]
    rad = 2.0 * np.max(ratios ** (1.0 / ks), axis=1)
    center = -rows[:, deg - 1] / (deg * lead)
    spread = rad + np.abs(center)
    ang = 2.0 * np.pi * np.arange(deg) / deg + 0.7
    z = center[:, None] + rad[:, None] * np.exp(1j * ang)[None, :]
    floor = tol * spread
    iters = np.full(m, maxiter, dtype=np.int64)
    active = spread > 0
    z[~active] = 0
    iters[~active] = 0
    eye = np.eye(deg, dtype=bool)
    for it in range(maxiter):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        zi = z[idx]
        ci = rows[idx]
        p = np.full(zi.shape, 0j)
        dp = np.zeros_like(p)
        for k in range(deg, -1, -1):
            dp = dp * zi + p
            p = p * zi + ci[:, k, None]
        with np.errstate(all="ignore"):
            diff = zi[:, :, None] - zi[:, None, :]
            diff[:, eye] = np.inf
            s = np.sum(1.0 / diff, axis=2)
            den = dp - p * s
            w = np.where(den == 0, p * 1e-3 + 1e-8 * spread[idx, None], p / np.where(den == 0, 1, den))
        w = np.where(p == 0, 0, w)
        zi = zi - w
        z[idx] = zi
        done = np.all(np.abs(w) <= tol * np.abs(zi) + floor[idx, None], axis=1)
        iters[idx[done]] = it + 1
        active[idx[done]] = False
    return z, iters
