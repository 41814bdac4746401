"""Rank-one qubit POVMs on subsystem A and the discord upper bound they give.

A POVM is a list of elements ``mu_k (1 + n_k . sigma)`` with
``sum mu_k = 1``, ``|n_k| = 1`` and ``sum mu_k n_k = 0``; at most four
elements are needed for qubits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from . import _precise
from .discord_vn import DiscordResult, Method, MinimizeOptions, _base_terms, minimize_discord_vn
from .xcore import BlochParams, _h, as_params

MAX_OUTCOMES = 4
POVM_TOL = 1e-12
# Elements lighter than this are dropped.
MU_FLOOR = 1e-14


class InvalidPovm(ValueError):
    """Raised when a POVM violates its resolution-of-identity constraints."""


@dataclass(frozen=True)
class PovmElement:
    mu: float
    n: tuple


@dataclass(frozen=True)
class Povm:
    elements: tuple

    def __post_init__(self):
        els = tuple(
            e if isinstance(e, PovmElement) else PovmElement(float(e[0]), tuple(map(float, e[1])))
            for e in self.elements
        )
        els = tuple(e for e in els if e.mu >= MU_FLOOR)
        object.__setattr__(self, "elements", els)
        validate_povm(self)

    def __len__(self):
        return len(self.elements)

    def residuals(self) -> dict:
        """Constraint residuals: weight sum, worst unit-norm error, first moment."""
        mus = np.array([e.mu for e in self.elements])
        ns = np.array([e.n for e in self.elements], dtype=float).reshape(-1, 3)
        return {
            "weight": abs(mus.sum() - 1.0),
            "norm": float(np.max(np.abs(np.linalg.norm(ns, axis=1) - 1.0))) if len(mus) else 0.0,
            "moment": float(np.linalg.norm(mus @ ns)) if len(mus) else 0.0,
        }

    def to_json(self) -> list:
        return [{"mu": e.mu, "n": list(e.n)} for e in self.elements]

    @classmethod
    def from_json(cls, data: list) -> "Povm":
        return cls(tuple(PovmElement(float(d["mu"]), tuple(float(v) for v in d["n"])) for d in data))


def validate_povm(povm: Povm, tol: float = POVM_TOL) -> None:
    k = len(povm.elements)
    if k == 0:
        raise InvalidPovm("POVM has no elements")
    if k > MAX_OUTCOMES:
        raise InvalidPovm(f"at most {MAX_OUTCOMES} outcomes allowed, got {k}")
    for e in povm.elements:
        if not 0 < e.mu <= 1 + tol:
            raise InvalidPovm(f"weight must lie in (0, 1], got {e.mu!r}")
        if len(e.n) != 3:
            raise InvalidPovm(f"direction must be a 3-vector, got {e.n!r}")
    res = povm.residuals()
    if res["weight"] > tol:
        raise InvalidPovm(f"weights sum to {1 + res['weight']!r}, not 1")
    if res["norm"] > tol:
        raise InvalidPovm(f"directions must be unit vectors (error {res['norm']!r})")
    if res["moment"] > tol:
        raise InvalidPovm(f"sum of mu_k n_k must vanish (norm {res['moment']!r})")


def three_outcome_povm(theta: float) -> Povm:
    """Three-element POVM interpolating between sigma_z (theta=0) and sigma_x (pi/2).

    ``mu_1 = cos/(1+cos)`` along ``-z``; two elements of weight
    ``1/(2(1+cos))`` along ``(+-sin, 0, cos)``.
    """
    if not -1e-12 <= theta <= math.pi / 2 + 1e-12:
        raise ValueError(f"theta must lie in [0, pi/2], got {theta!r}")
    c, sn = math.cos(theta), math.sin(theta)
    c = max(c, 0.0)
    side = 1.0 / (2.0 * (1.0 + c))
    return Povm(
        (
            PovmElement(c / (1.0 + c), (0.0, 0.0, -1.0)),
            PovmElement(side, (sn, 0.0, c)),
            PovmElement(side, (-sn, 0.0, c)),
        )
    )


def antipodal_povm(theta: float, phi: float = 0.0) -> Povm:
    """Projective measurement along ``n(theta, phi)`` written as a two-element POVM."""
    n = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    return Povm((PovmElement(0.5, n), PovmElement(0.5, tuple(-v for v in n))))


def _terms(p: BlochParams, povm: Povm, in_plane_bound: bool):
    total = 0.0
    for e in povm.elements:
        nx, ny, nz = e.n
        prob = e.mu * (1.0 + p.x * nz)
        if prob <= MU_FLOOR:
            continue
        if in_plane_bound:
            length2 = (1.0 - nz * nz) * p.s ** 2 + (p.y + nz * p.t) ** 2
        else:
            length2 = (p.s * nx) ** 2 + (p.u * ny) ** 2 + (p.y + nz * p.t) ** 2
        total += prob * float(_h(e.mu * math.sqrt(max(length2, 0.0)) / prob))
    return total


def conditional_entropy_povm(p, povm: Povm) -> float:
    """``sum_k p_k S(rho_B|k)`` with ``p_k = mu_k (1 + x n_kz)``.

    The conditional state of B after outcome ``k`` has Bloch vector
    ``(s n_kx, u n_ky, y + t n_kz) / (1 + x n_kz)``, so the value is exact for
    any directions, in or out of the x-z plane.

    Raises:
        InvalidPovm: if ``povm`` violates its constraints.
    """
    validate_povm(povm)
    return _terms(as_params(p), povm, in_plane_bound=False)


def conditional_entropy_bound(p, povm: Povm) -> float:
    """Lower bound on :func:`conditional_entropy_povm` with ``|n_ky|`` folded into x.

    Uses ``Delta_k = (1 - n_kz^2) s^2 + (y + n_kz t)^2``; equal to the exact
    value when every ``n_ky = 0`` and never above it when ``s >= |u|``.
    """
    validate_povm(povm)
    return _terms(as_params(p), povm, in_plane_bound=True)


def _three_outcome_precise(p: BlochParams, nz_opt: float, dps: int):
    with mp.workdps(dps):
        x, y, t, s, u = (mp.mpf(v) for v in p.as_tuple())
        c = mp.mpf(nz_opt)
        sn = mp.sqrt(max(1 - c * c, 0))
        side = 1 / (2 * (1 + c))
        total = _precise.weighted_term(c / (1 + c), x, y, t, s, u, (0, 0, -1))
        total += _precise.weighted_term(side, x, y, t, s, u, (sn, 0, c))
        total += _precise.weighted_term(side, x, y, t, s, u, (-sn, 0, c))
        base = _precise.h(x) - _precise.state_entropy(x, y, t, s, u)
        mi = base + _precise.h(y)
        d = base + total
        return float(d), float(mi), float(mi - d)


def discord_upper_povm(p, opts: MinimizeOptions | None = None) -> DiscordResult:
    """Discord upper bound from the three-outcome POVM at the von Neumann optimum.

    Finds ``theta_opt`` with a forced scan, builds
    :func:`three_outcome_povm` at that angle and evaluates
    ``S(A) - S(AB) + sum_k p_k S(rho_B|k)``. Since any POVM gives an upper
    bound on the POVM-minimised discord, so does this one.
    """
    opts = opts or MinimizeOptions()
    forced = MinimizeOptions(opts.grid_points, opts.tol, False, opts.precision)
    vn = minimize_discord_vn(p, forced)
    nz = min(max(vn.optimal_nz, 0.0), 1.0)
    extras = {"theta_povm": math.acos(nz), "discord_vn": vn.discord}
    if opts.precision is not None:
        if not isinstance(p, BlochParams):
            p = as_params(p)
        d, mi, j = _three_outcome_precise(p, nz, opts.precision)
        return DiscordResult(d, j, mi, nz, Method.POVM_UPPER, extras)
    p = as_params(p)
    base, mi = _base_terms(p)
    d = base + conditional_entropy_povm(p, three_outcome_povm(math.acos(nz)))
    return DiscordResult(d, mi - d, mi, nz, Method.POVM_UPPER, extras)
