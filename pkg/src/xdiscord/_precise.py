"""Arbitrary-precision (mpmath) counterparts of the hot-path formulas.

Along the X_m curve near ``m = 1/2`` the gap between the sigma_z discord and
the true minimum shrinks like ``(1/2 - m)**4`` and drops below 1e-13, where
float64 rounding hides the location of the minimum. These scalar versions
mirror the vectorised numpy code and are checked against it in the tests.
"""

from __future__ import annotations

import mpmath as mp

DEFAULT_DPS = 40


def h(w):
    w = abs(w)
    if w > 1:
        w = mp.mpf(1)
    a = (1 + w) / 2
    b = (1 - w) / 2
    out = mp.mpf(0)
    if a > 0:
        out -= a * mp.log(a, 2)
    if b > 0:
        out -= b * mp.log(b, 2)
    return out


def state_entropy(x, y, t, s, u):
    """Von Neumann entropy of the X-state with the given Bloch parameters."""
    r00 = (1 + x + y + t) / 4
    r11 = (1 + x - y - t) / 4
    r22 = (1 - x + y - t) / 4
    r33 = (1 - x - y + t) / 4
    r03 = abs(s - u) / 4
    r12 = abs(s + u) / 4
    total = mp.mpf(0)
    for a, b, c in ((r00, r33, r03), (r11, r22, r12)):
        q = mp.sqrt((a - b) ** 2 + 4 * c * c)
        for lam in ((a + b + q) / 2, (a + b - q) / 2):
            if lam > 0:
                total -= lam * mp.log(lam, 2)
    return total


def weighted_term(mu, x, y, t, s, u, n):
    """``p_k S(rho_B|k)`` for one rank-one POVM element ``mu (1 + n.sigma)``."""
    nx, ny, nz = n
    p = mu * (1 + x * nz)
    if p <= 0:
        return mp.mpf(0)
    r = mp.sqrt((s * nx) ** 2 + (u * ny) ** 2 + (y + t * nz) ** 2)
    return p * h(mu * r / p)


def cond_entropy_vn(x, y, t, s, nz):
    nx = mp.sqrt(max(1 - nz * nz, 0))
    half = mp.mpf(1) / 2
    return weighted_term(half, x, y, t, s, 0, (nx, 0, nz)) + weighted_term(
        half, x, y, t, s, 0, (-nx, 0, -nz)
    )


def golden_section(f, a, b, tol):
    """Minimise a unimodal scalar function on ``[a, b]``; returns ``(x, f(x))``."""
    r = (mp.sqrt(5) - 1) / 2
    c = b - r * (b - a)
    d = a + r * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - r * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + r * (b - a)
            fd = f(d)
    xm = (a + b) / 2
    return xm, f(xm)


def scan_minimize(f, grid_points, tol, noise):
    """Grid search on ``[0, 1]`` followed by golden-section refinement.

    Endpoints win ties within ``noise`` so flat-bottomed objectives report
    ``0`` or ``1`` rather than a rounding artefact.
    """
    n = grid_points
    grid = [mp.mpf(i) / (n - 1) for i in range(n)]
    vals = [f(g) for g in grid]
    i = min(range(n), key=lambda k: vals[k])
    best_x, best_f = grid[i], vals[i]
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
    xr, fr = golden_section(f, lo, hi, tol)
    if fr < best_f:
        best_x, best_f = xr, fr
    for j in (n - 1, 0):
        if vals[j] <= best_f + noise:
            return grid[j], vals[j]
    return best_x, best_f
