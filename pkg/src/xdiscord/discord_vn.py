"""Quantum discord of X-states under von Neumann measurements on qubit A.

For a real X-state the optimal projective measurement lies in the x-z plane,
so the search reduces to one variable, ``nz = cos(theta)`` in ``[0, 1]``
(the two outcomes ``+n`` and ``-n`` are interchangeable). Three routes are
provided:

* an analytic classifier that recognises states whose optimum is provably
  sigma_z or sigma_x;
* closed forms at ``nz = 1`` (sigma_z) and ``nz = 0`` (sigma_x);
* a global grid scan refined by golden-section search.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from . import _precise
from .xcore import (
    BlochParams,
    CanonicalXState,
    InvalidState,
    _h,
    as_params,
    as_state,
    binary_entropy,
    bloch_params,
    entropy,
    mutual_information,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# Below this probability an outcome contributes no entropy.
_P_FLOOR = 1e-14
# Ties within this many bits go to the sigma_z / sigma_x endpoints.
_FLOAT_NOISE = 2e-15


class AnalyticClass(str, enum.Enum):
    SIGMA_Z = "SigmaZ"
    SIGMA_X = "SigmaX"
    BOTH = "Both"
    UNKNOWN = "Unknown"

    @property
    def has_z(self) -> bool:
        return self in (AnalyticClass.SIGMA_Z, AnalyticClass.BOTH)

    @property
    def has_x(self) -> bool:
        return self in (AnalyticClass.SIGMA_X, AnalyticClass.BOTH)


class Method(str, enum.Enum):
    ANALYTIC_Z = "AnalyticZ"
    ANALYTIC_X = "AnalyticX"
    NUMERIC_SCAN = "NumericScan"
    POVM_UPPER = "PovmUpper"


@dataclass(frozen=True)
class VnMeasurement:
    """Projective measurement along ``(sqrt(1 - nz^2), 0, nz)``."""

    nz: float

    def __post_init__(self):
        if not -1e-12 <= self.nz <= 1 + 1e-12:
            raise ValueError(f"nz must lie in [0, 1], got {self.nz!r}")

    @classmethod
    def from_angle(cls, theta: float) -> "VnMeasurement":
        return cls(min(abs(math.cos(theta)), 1.0))

    @property
    def theta(self) -> float:
        return math.acos(min(max(float(self.nz), -1.0), 1.0))


@dataclass(frozen=True)
class MinimizeOptions:
    """Knobs for :func:`minimize_discord_vn`.

    ``precision`` switches the scan to mpmath with that many decimal digits;
    ``None`` keeps float64.
    """

    grid_points: int = 201
    tol: float = 1e-12
    fast_path: bool = True
    precision: int | None = None

    def __post_init__(self):
        if self.grid_points < 3:
            raise ValueError("grid_points must be at least 3")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class DiscordResult:
    discord: float
    classical_correlation: float
    mutual_information: float
    optimal_nz: float
    method: Method
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def theta_opt(self) -> float:
        return math.acos(min(max(self.optimal_nz, -1.0), 1.0))

    def to_dict(self) -> dict:
        out = {
            "discord": self.discord,
            "classical_correlation": self.classical_correlation,
            "mutual_information": self.mutual_information,
            "optimal_nz": self.optimal_nz,
            "theta_opt": self.theta_opt,
            "method": self.method.value,
        }
        out.update(self.extras)
        return out


def _nz_of(m) -> float | np.ndarray:
    if isinstance(m, VnMeasurement):
        return m.nz
    return m


def cond_entropy_vn_arrays(x, y, t, s, nz):
    """Vectorised ``S(nz)``; all arguments broadcast, ``nz`` may be signed."""
    x, y, t, s, nz = (np.asarray(v, dtype=float) for v in (x, y, t, s, nz))
    perp = np.maximum(1.0 - nz * nz, 0.0) * s * s
    total = 0.0
    for sign in (1.0, -1.0):
        p = 0.5 * (1.0 + sign * x * nz)
        ok = p > _P_FLOOR
        safe_p = np.where(ok, p, 1.0)
        r = np.sqrt(perp + (y + sign * nz * t) ** 2) / (2.0 * safe_p)
        total = total + np.where(ok, p * _h(r), 0.0)
    return total


def conditional_entropy_vn(p, m):
    """Average entropy of qubit B after measuring A along ``m``.

    With ``p_pm = (1 +- x nz)/2`` and ``D_pm = (1 - nz^2) s^2 + (y +- nz t)^2``
    this is ``sum p_pm h(sqrt(D_pm) / (2 p_pm))``. ``m`` may be a
    :class:`VnMeasurement`, a float or an array of (signed) ``nz`` values.
    """
    p = as_params(p)
    out = cond_entropy_vn_arrays(p.x, p.y, p.t, p.s, _nz_of(m))
    return float(out) if np.ndim(out) == 0 else out


def _base_terms(p: BlochParams):
    """``h(x) - S(rho)`` and ``I(rho)`` for the state with params ``p``."""
    state = as_state(p)
    s_ab = entropy(state)
    hx = binary_entropy(p.x)
    hy = binary_entropy(p.y)
    return hx - s_ab, max(hx + hy - s_ab, 0.0)


def discord_given_measurement(p, m):
    """``D(nz) = S(A) - S(AB) + S(nz)`` for a fixed projective measurement."""
    p = as_params(p)
    base, _ = _base_terms(p)
    return base + conditional_entropy_vn(p, m)


def discord_sigma_z(p) -> float:
    return float(discord_given_measurement(p, 1.0))


def discord_sigma_x(p) -> float:
    return float(discord_given_measurement(p, 0.0))


def classify_analytic(state, tol: float = 1e-14) -> AnalyticClass:
    """Decide whether sigma_z and/or sigma_x is provably optimal.

    sigma_z is optimal when ``(rho12 + rho03)^2 <= (rho00 - rho11)(rho33 - rho22)``,
    equivalently ``t^2 >= y^2 + s^2``; sigma_x is optimal when
    ``|sqrt(rho00 rho33) - sqrt(rho11 rho22)| <= rho12 + rho03``. Both
    statements hold for von Neumann measurements and for general POVMs.
    """
    st = as_state(state)
    coh = st.rho12 + st.rho03
    z_margin = (st.rho00 - st.rho11) * (st.rho33 - st.rho22) - coh * coh
    p = bloch_params(st)
    alt = (p.t * p.t - p.y * p.y - p.s * p.s) / 4
    if abs(z_margin - alt) > 1e-12:
        raise RuntimeError(
            f"sigma_z criteria disagree ({z_margin!r} vs {alt!r}); state is not canonical"
        )
    case_z = z_margin >= -tol
    x_margin = coh - abs(math.sqrt(st.rho00 * st.rho33) - math.sqrt(st.rho11 * st.rho22))
    case_x = x_margin >= -tol
    if case_z and case_x:
        return AnalyticClass.BOTH
    if case_z:
        return AnalyticClass.SIGMA_Z
    if case_x:
        return AnalyticClass.SIGMA_X
    return AnalyticClass.UNKNOWN


def _golden_batch(f, a, b, tol):
    width = float(np.max(b - a)) if a.size else 0.0
    iters = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(_GOLDEN)))
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _GOLDEN * (b - a)
        new_d = a + _GOLDEN * (b - a)
        fn = f(np.where(left, new_c, new_d))
        c, fc, d, fd = (
            np.where(left, new_c, d),
            np.where(left, fn, fd),
            np.where(left, c, new_d),
            np.where(left, fc, fn),
        )
    xm = 0.5 * (a + b)
    return xm, f(xm)


def scan_conditional_entropy(x, y, t, s, grid_points: int = 201, tol: float = 1e-12):
    """Minimise ``S(nz)`` over ``[0, 1]`` for a batch of states.

    A uniform grid of ``grid_points`` values locates the best cell, then
    golden-section search refines inside the two neighbouring cells to width
    ``tol``. Endpoint values within float noise of the minimum win.

    Returns:
        ``(nz_opt, s_min, s_at_0, s_at_1)`` as 1-D arrays.
    """
    x, y, t, s = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (x, y, t, s))
    grid = np.linspace(0.0, 1.0, grid_points)
    vals = cond_entropy_vn_arrays(x[:, None], y[:, None], t[:, None], s[:, None], grid[None, :])
    idx = np.argmin(vals, axis=1)
    rows = np.arange(len(x))
    grid_best = vals[rows, idx]
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, grid_points - 1)]

    def f(nz):
        return cond_entropy_vn_arrays(x, y, t, s, nz)

    nz_ref, f_ref = _golden_batch(f, lo, hi, tol)
    better = f_ref < grid_best
    nz_opt = np.where(better, nz_ref, grid[idx])
    s_min = np.where(better, f_ref, grid_best)
    s0, s1 = vals[:, 0], vals[:, -1]
    noise = _FLOAT_NOISE * np.maximum(1.0, np.abs(s_min))
    snap_x = s0 <= s_min + noise
    snap_z = s1 <= s_min + noise
    nz_opt = np.where(snap_z, 1.0, np.where(snap_x, 0.0, nz_opt))
    s_min = np.where(snap_z, s1, np.where(snap_x, s0, s_min))
    return nz_opt, s_min, s0, s1


def _minimize_precise(p: BlochParams, opts: MinimizeOptions):
    with mp.workdps(opts.precision):
        x, y, t, s, u = (mp.mpf(v) for v in p.as_tuple())

        def f(nz):
            return _precise.cond_entropy_vn(x, y, t, s, nz)

        tol = mp.mpf(opts.tol)
        noise = mp.mpf(10) ** (-(opts.precision - 5))
        nz, s_min = _precise.scan_minimize(f, opts.grid_points, tol, noise)
        hx, hy = _precise.h(x), _precise.h(y)
        s_ab = _precise.state_entropy(x, y, t, s, u)
        discord = hx - s_ab + s_min
        mi = hx + hy - s_ab
        return float(nz), float(discord), float(mi), float(mi - discord)


def minimize_discord_vn(p, opts: MinimizeOptions | None = None) -> DiscordResult:
    """Quantum discord ``D_A`` minimised over projective measurements on A.

    The analytic classifier short-circuits the search when it applies (unless
    ``opts.fast_path`` is off); otherwise a grid-plus-golden scan over
    ``nz`` in ``[0, 1]`` is run.

    Raises:
        InvalidState: if ``p`` is not a valid state.
    """
    opts = opts or MinimizeOptions()
    # Exact (mpmath-valued) parameters pass through untouched on the precise path.
    if opts.precision is None or not isinstance(p, BlochParams):
        p = as_params(p)
    base, mi = _base_terms(p) if opts.precision is None else (None, None)

    if opts.fast_path:
        cls = classify_analytic(p)
        if cls is not AnalyticClass.UNKNOWN:
            dz, dx = discord_sigma_z(p), discord_sigma_x(p)
            if cls.has_z and (not cls.has_x or dz <= dx):
                d, nz, method = dz, 1.0, Method.ANALYTIC_Z
            else:
                d, nz, method = dx, 0.0, Method.ANALYTIC_X
            return DiscordResult(d, mi - d, mi, nz, method)

    if opts.precision is not None:
        nz, d, mi, j = _minimize_precise(p, opts)
        return DiscordResult(d, j, mi, nz, Method.NUMERIC_SCAN)

    nz, s_min, _, _ = scan_conditional_entropy(p.x, p.y, p.t, p.s, opts.grid_points, opts.tol)
    d = base + float(s_min[0])
    return DiscordResult(d, mi - d, mi, float(nz[0]), Method.NUMERIC_SCAN)


def classical_correlation(p, opts: MinimizeOptions | None = None) -> float:
    """``J_A = S(B) - min S(nz) = I - D_A``."""
    return minimize_discord_vn(p, opts).classical_correlation


def algorithm_gap(p, opts: MinimizeOptions | None = None) -> float:
    """``min(D_sigma_z, D_sigma_x) - D_A`` with the scan forced on."""
    opts = opts or MinimizeOptions()
    forced = MinimizeOptions(opts.grid_points, opts.tol, False, opts.precision)
    res = minimize_discord_vn(p, forced)
    return min(discord_sigma_z(p), discord_sigma_x(p)) - res.discord


__all__ = [
    "AnalyticClass",
    "DiscordResult",
    "InvalidState",
    "Method",
    "MinimizeOptions",
    "VnMeasurement",
    "algorithm_gap",
    "classical_correlation",
    "classify_analytic",
    "cond_entropy_vn_arrays",
    "conditional_entropy_vn",
    "discord_given_measurement",
    "discord_sigma_x",
    "discord_sigma_z",
    "minimize_discord_vn",
    "scan_conditional_entropy",
]
