"""Named X-state families: X3(m, eps), Bell-diagonal states and the X_m curve."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import mpmath as mp

from . import _precise
from .discord_vn import MinimizeOptions, minimize_discord_vn
from .povm import discord_upper_povm
from .xcore import BlochParams, CanonicalXState, DomainError, InvalidState, from_bloch_params

# Working precision (decimal digits) for the X_m curve.
XM_DPS = _precise.DEFAULT_DPS
XM_BRACKET = (1e-9, 1.0 / 3.0)


class NoRoot(RuntimeError):
    """Raised when the X_m condition has no unique bracketed root."""


@dataclass(frozen=True)
class X3Params:
    m: float
    eps: float

    def __post_init__(self):
        if not 0 <= self.m <= 0.5:
            raise DomainError(f"m must lie in [0, 1/2], got {self.m!r}")
        if not 0 <= self.eps <= 1:
            raise DomainError(f"eps must lie in [0, 1], got {self.eps!r}")


@dataclass(frozen=True)
class XmPoint:
    m: float
    eps: float
    theta_opt: float
    delta: float
    delta_tilde: float

    def to_dict(self) -> dict:
        return asdict(self)


CSV_FIELDS = ("m", "eps", "theta_opt", "delta", "delta_tilde")


def x3_params(m, eps) -> BlochParams:
    """Bloch parameters of X3: ``x = -y = (1-eps)(2m-1)``, ``t = 2eps-1``, ``s = -u = eps``.

    Works with floats or mpmath numbers.
    """
    x = (1 - eps) * (2 * m - 1)
    return BlochParams(x, -x, 2 * eps - 1, eps, -eps)


def x3_state(p: X3Params | None = None, *, m: float | None = None, eps: float | None = None) -> CanonicalXState:
    """Mixture of the Bell projector ``Phi+`` (weight eps) with ``|01>``, ``|10>``.

    Diagonal ``(eps/2, (1-eps) m, (1-eps)(1-m), eps/2)``, ``rho03 = eps/2``.
    """
    if p is None:
        p = X3Params(m, eps)
    e, mm = p.eps, p.m
    return CanonicalXState(e / 2, (1 - e) * mm, (1 - e) * (1 - mm), e / 2, e / 2, 0.0)


def _check_boundary_domain(m, eps):
    if not 0 <= m <= 0.5:
        raise DomainError(f"m must lie in [0, 1/2], got {m!r}")
    if not 0 <= eps < 1:
        raise DomainError(f"eps must lie in [0, 1), got {eps!r}")


def boundary_bx(m: float, eps: float) -> float:
    """``sqrt(m(1-m)) - eps/(1-eps)``; sigma_x is optimal for X3 where this is <= 0."""
    _check_boundary_domain(m, eps)
    return math.sqrt(m * (1 - m)) - eps / (1 - eps)


def boundary_bz(m: float, eps: float) -> float:
    """``eps/(1-eps) - 2m(1-m)``; sigma_z is optimal for X3 where this is <= 0."""
    _check_boundary_domain(m, eps)
    return eps / (1 - eps) - 2 * m * (1 - m)


def bell_diagonal(t: float, s: float, u: float) -> CanonicalXState:
    """Bell-diagonal state (``x = y = 0``) in canonical form.

    Raises:
        InvalidState: if ``(t, s, u)`` is outside the tetrahedron of valid states.
    """
    return from_bloch_params(BlochParams(0.0, 0.0, t, s, u))


def xm_residual(m, eps):
    """``D_sigma_z - D_sigma_x`` for X3(m, eps); zero on the X_m curve.

    Equals ``eps - [h(sqrt(x^2 + eps^2)) + h(x) - h(t) - (1-eps) h(2m-1)]``.
    Evaluated in mpmath at the ambient precision.
    """
    m, eps = mp.mpf(m), mp.mpf(eps)
    x, y, t, s, _ = x3_params(m, eps).as_tuple()
    return _precise.cond_entropy_vn(x, y, t, s, 1) - _precise.cond_entropy_vn(x, y, t, s, 0)


def solve_eps(m: float, dps: int = XM_DPS, bracket_scan: int = 64):
    """Root ``eps(m)`` of the X_m condition by bisection on ``[1e-9, 1/3]``.

    Returns the root as an mpmath number at ``dps`` digits.

    Raises:
        NoRoot: if the bracket scan does not show exactly one sign change.
    """
    if not 0 < m <= 0.5:
        raise DomainError(f"m must lie in (0, 1/2], got {m!r}")
    with mp.workdps(dps):
        lo, hi = mp.mpf(XM_BRACKET[0]), mp.mpf(1) / 3
        zero_tol = mp.mpf(10) ** (-(dps - 5))
        f_hi = xm_residual(m, hi)
        if abs(f_hi) <= zero_tol:
            # m = 1/2: the curve ends on the bracket edge.
            return +hi
        pts = [lo + (hi - lo) * k / (bracket_scan - 1) for k in range(bracket_scan)]
        vals = [xm_residual(m, e) for e in pts]
        signs = [v > 0 for v in vals]
        changes = [k for k in range(bracket_scan - 1) if signs[k] != signs[k + 1]]
        if len(changes) != 1:
            raise NoRoot(
                f"expected one sign change of the X_m residual on [{XM_BRACKET[0]}, 1/3] "
                f"for m={m!r}, found {len(changes)}"
            )
        k = changes[0]
        a, b, fa = pts[k], pts[k + 1], vals[k]
        width = mp.mpf(10) ** (-(dps - 10))
        while b - a > width:
            mid = (a + b) / 2
            fm = xm_residual(m, mid)
            if fm == 0:
                return mid
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        return (a + b) / 2


def solve_xm(m: float, opts: MinimizeOptions | None = None, dps: int = XM_DPS) -> XmPoint:
    """Locate the X_m state for ``m`` and measure how far sigma_x/sigma_z miss.

    ``eps`` solves ``D_sigma_z = D_sigma_x`` for X3(m, eps). ``delta`` is
    ``D_sigma_z - D_A`` (von Neumann optimum) and ``delta_tilde`` is
    ``D_sigma_z`` minus the three-outcome POVM bound. The whole computation
    runs at ``dps`` digits because ``delta`` falls below 1e-13 near
    ``m = 1/2``.
    """
    opts = opts or MinimizeOptions()
    scan = MinimizeOptions(opts.grid_points, opts.tol, False, dps)
    eps = solve_eps(m, dps)
    with mp.workdps(dps):
        params = x3_params(mp.mpf(m), eps)
        x, y, t, s, u = params.as_tuple()
        d0 = _precise.h(x) - _precise.state_entropy(x, y, t, s, u) + _precise.cond_entropy_vn(x, y, t, s, 1)
        vn = minimize_discord_vn(params, scan)
        upper = discord_upper_povm(params, scan)
        delta = float(d0 - mp.mpf(vn.discord))
        delta_tilde = float(d0 - mp.mpf(upper.discord))
    theta = vn.theta_opt
    if m == 0.5:
        # Bell-diagonal with |t| = |s|: every direction is optimal; pi/4 continues the curve.
        theta = math.pi / 4
    return XmPoint(float(m), float(eps), theta, delta, delta_tilde)
