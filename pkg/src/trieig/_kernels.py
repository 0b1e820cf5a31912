"""Compiled inner loops.

Every kernel follows the IEEE policy of the solver: no zero checks inside a
sweep, inf/NaN simply propagate and the caller inspects the outputs once the
sweep is finished. The one exception is the tridqds bulge: an exactly zero
bulge is left alone instead of being divided by a possibly zero pivot, which
keeps diagonal input invariant. ``error_model="numpy"`` gives C semantics for float
division (x/0 -> inf, 0/0 -> nan) instead of raising.

Arrays are 0-based here; comments use the 1-based names of the recurrences.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_jit = njit(cache=True, error_model="numpy", nogil=True)


@_jit
def dqds_kernel(u, l, sigma):
    n = u.shape[0]
    uh = np.empty(n)
    lh = np.empty(n - 1)
    d = np.empty(n)
    asig = abs(sigma)
    growth = 0.0
    di = u[0] - sigma
    d[0] = di
    for i in range(n - 1):
        uh[i] = di + l[i]
        t = u[i + 1] / uh[i]
        lh[i] = l[i] * t
        # growth term for index i, once l-hat_i and d_i are known
        g = (asig + abs(lh[i]) + 3.0 * abs(di)) / (abs(u[i]) + abs(l[i]))
        if g > growth:
            growth = g
        di = di * t - sigma
        d[i + 1] = di
    uh[n - 1] = di
    # l-hat_n and l_n are 0
    g = (asig + 3.0 * abs(di)) / abs(u[n - 1])
    if g > growth:
        growth = g
    return uh, lh, d, growth


@_jit
def qds_kernel(u, l, sigma):
    n = u.shape[0]
    uh = np.empty(n)
    lh = np.empty(n - 1)
    if n == 1:
        uh[0] = u[0] - sigma
        return uh, lh
    uh[0] = u[0] + l[0] - sigma
    for i in range(n - 1):
        lh[i] = l[i] * u[i + 1] / uh[i]
        nxt = l[i + 1] if i + 1 < n - 1 else 0.0
        uh[i + 1] = u[i + 1] + nxt - sigma - lh[i]
    return uh, lh


@_jit
def _cdiv(xr, xi, yr, yi):
    # Smith's algorithm; exact x/y when both imaginary parts are 0.
    if abs(yr) >= abs(yi):
        r = yi / yr
        den = yr + yi * r
        return (xr + xi * r) / den, (xi - xr * r) / den
    r = yr / yi
    den = yi + yr * r
    return (xr * r + xi) / den, (xi * r - xr) / den


@_jit
def complex_dqds_kernel(u, l, sigma):
    n = u.shape[0]
    uh = np.empty(n, dtype=np.complex128)
    lh = np.empty(n - 1, dtype=np.complex128)
    sr = sigma.real
    si = sigma.imag
    dr = u[0].real - sr
    di = u[0].imag - si
    for i in range(n - 1):
        ur = dr + l[i].real
        ui = di + l[i].imag
        uh[i] = complex(ur, ui)
        tr, ti = _cdiv(u[i + 1].real, u[i + 1].imag, ur, ui)
        lr = l[i].real
        li = l[i].imag
        lh[i] = complex(lr * tr - li * ti, lr * ti + li * tr)
        ndr = dr * tr - di * ti - sr
        ndi = dr * ti + di * tr - si
        dr = ndr
        di = ndi
    uh[n - 1] = complex(dr, di)
    return uh, lh


@_jit
def tridqds_kernel(u, l, re_sigma, abs2_sigma):
    """One restoring triple-shift sweep; needs n >= 4.

    Returns (u-hat, l-hat, growth) where growth is the largest condition
    surrogate of the elementary similarities used by the minor steps.
    """
    n = u.shape[0]
    uh = np.empty(n)
    lh = np.empty(n - 1)
    growth = 0.0

    # step 1
    xr = 1.0
    yr = l[0]
    zr = 0.0
    xr = xr * u[0] + yr
    s1 = u[0] + l[0]
    m21 = u[1] * l[0]
    xl = s1 * s1 + m21 - 2.0 * re_sigma * s1 + abs2_sigma
    yl = -m21 * u[2] * l[1] / xl
    xl = -m21 * (s1 + u[1] + l[1] - 2.0 * re_sigma) / xl
    g = xl * xl + yl * yl
    if g > growth:
        growth = g
    uh[0] = xr - xl
    xr = yr - xl
    yr = zr - yl - xl * l[1]
    zr = -yl * l[2]
    inv = 1.0 / uh[0]
    xr = xr * inv
    yr = yr * inv
    zr = zr * inv
    g = xr * xr + yr * yr + zr * zr
    if g > growth:
        growth = g
    lh[0] = xl + yr + xr * u[1]
    xl = yl + zr + yr * u[2]
    yl = zr * u[3]
    xr = 1.0 - xr
    yr = l[1] - yr
    zr = -zr

    # minor steps i = 2..n-3 (0-based k = i-1)
    for k in range(1, n - 3):
        xr = xr * u[k] + yr
        # a bulge that is exactly zero stays zero, even over a zero pivot
        if xl != 0.0 or yl != 0.0:
            inv = 1.0 / lh[k - 1]
            xl = -xl * inv
            yl = -yl * inv
        g = xl * xl + yl * yl
        if g > growth:
            growth = g
        uh[k] = xr - xl
        xr = yr - xl
        yr = zr - yl - xl * l[k + 1]
        zr = -yl * l[k + 2]
        inv = 1.0 / uh[k]
        xr = xr * inv
        yr = yr * inv
        zr = zr * inv
        g = xr * xr + yr * yr + zr * zr
        if g > growth:
            growth = g
        lh[k] = xl + yr + xr * u[k + 1]
        xl = yl + zr + yr * u[k + 2]
        yl = zr * u[k + 3]
        xr = 1.0 - xr
        yr = l[k + 1] - yr
        zr = -zr

    # step n-2
    k = n - 3
    xr = xr * u[k] + yr
    if xl != 0.0 or yl != 0.0:
        inv = 1.0 / lh[k - 1]
        xl = -xl * inv
        yl = -yl * inv
    g = xl * xl + yl * yl
    if g > growth:
        growth = g
    uh[k] = xr - xl
    xr = yr - xl
    yr = zr - yl - xl * l[k + 1]
    inv = 1.0 / uh[k]
    xr = xr * inv
    yr = yr * inv
    g = xr * xr + yr * yr
    if g > growth:
        growth = g
    lh[k] = xl + yr + xr * u[k + 1]
    xl = yl + yr * u[k + 2]
    xr = 1.0 - xr
    yr = l[k + 1] - yr

    # step n-1
    k = n - 2
    xr = xr * u[k] + yr
    if xl != 0.0:
        xl = -xl / lh[k - 1]
    g = xl * xl
    if g > growth:
        growth = g
    uh[k] = xr - xl
    xr = yr - xl
    xr = xr / uh[k]
    g = xr * xr
    if g > growth:
        growth = g
    lh[k] = xl + xr * u[k + 1]
    xr = 1.0 - xr

    # step n
    uh[n - 1] = xr * u[n - 1]
    return uh, lh, growth


@_jit
def newton_ratio_kernel(a, e, z):
    """p(z)/p'(z) for the charpoly of tridiag with diag a and couplings e.

    The pair (p_k, p_{k-1}) and its derivative are rescaled together, which
    leaves the ratio untouched.
    """
    n = a.shape[0]
    p_prev = 1.0 + 0j
    dp_prev = 0j
    p = z - a[0]
    dp = 1.0 + 0j
    for k in range(1, n):
        pk = (z - a[k]) * p - e[k - 1] * p_prev
        dpk = p + (z - a[k]) * dp - e[k - 1] * dp_prev
        p_prev = p
        dp_prev = dp
        p = pk
        dp = dpk
        m = max(abs(p.real), abs(p.imag), abs(dp.real), abs(dp.imag))
        if m > 1e100:
            s = 1e-100
            p *= s
            dp *= s
            p_prev *= s
            dp_prev *= s
        elif 0.0 < m < 1e-100:
            s = 1e100
            p *= s
            dp *= s
            p_prev *= s
            dp_prev *= s
    return p, dp


@_jit
def aberth_sweep(a, e, z, active, tol):
    """One Jacobi-style Ehrlich-Aberth sweep over the active approximations."""
    n = z.shape[0]
    znew = z.copy()
    corr = np.zeros(n)
    dzero = False
    for k in range(n):
        if not active[k]:
            continue
        p, dp = newton_ratio_kernel(a, e, z[k])
        if dp == 0:
            dzero = True
            continue
        N = p / dp
        s = 0j
        for j in range(n):
            if j != k:
                w = z[k] - z[j]
                if w != 0:
                    s += 1.0 / w
        den = 1.0 - N * s
        znew[k] = z[k] - (N / den if den != 0 else N)
        corr[k] = abs(N)
    for k in range(n):
        if active[k] and corr[k] <= tol * (1.0 + abs(znew[k])):
            active[k] = False
    return znew, corr, dzero
