"""Numerical experiments: region maps, the X_m curve, J-D data and random search.

Every output is deterministic given its arguments. Random search splits the
samples into chunks seeded by ``(seed, chunk_index)``, so serial and
parallel runs produce the same report.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .discord_vn import (
    AnalyticClass,
    MinimizeOptions,
    classify_analytic,
    discord_sigma_z,
    scan_conditional_entropy,
)
from .families import XmPoint, solve_xm, x3_params, x3_state
from .xcore import BlochParams, mutual_information

WORKERS_ENV = "XDISCORD_WORKERS"
MAX_ATTEMPTS = 1_000_000
SAMPLING_LAW = "uniform on [-1,1]^5 (u := s under s_equals_u), rejection on positivity"
SAMPLING_CAVEAT = (
    "The violation rate depends on the sampling measure; "
    "compare rates across measures only by order of magnitude."
)
COUNTEREXAMPLE = BlochParams(x=-0.8812, y=0.9407, t=-0.9383, s=0.2898, u=0.2898)

WINDOWS = {
    "fig1": ((0.0, 0.5), (0.0, 0.5)),
    "fig2": ((0.1, 0.102), (0.227, 0.229)),
}


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*items)))


# -- region maps ---------------------------------------------------------------


@dataclass(frozen=True)
class RegionCell:
    m: float
    eps: float
    cls: AnalyticClass
    theta_opt: float
    delta: float

    def row(self) -> dict:
        return {
            "m": self.m,
            "eps": self.eps,
            "class": self.cls.value,
            "theta_opt": self.theta_opt,
            "delta": self.delta,
        }


REGION_FIELDS = ("m", "eps", "class", "theta_opt", "delta")


def _grid_shape(grid) -> tuple:
    if isinstance(grid, int):
        return grid, grid
    return int(grid[0]), int(grid[1])


def region_map(m_range, eps_range, grid=50, opts: MinimizeOptions | None = None) -> list:
    """Classify and scan X3(m, eps) on a rectangular grid.

    ``theta_opt`` always comes from the forced scan; ``delta`` is the amount
    by which ``min(D_sigma_z, D_sigma_x)`` exceeds the scanned minimum.
    Cells are ordered m-major.
    """
    opts = opts or MinimizeOptions()
    nm, ne = _grid_shape(grid)
    ms = np.linspace(m_range[0], m_range[1], nm)
    es = np.linspace(eps_range[0], eps_range[1], ne)
    mm, ee = np.meshgrid(ms, es, indexing="ij")
    mm, ee = mm.ravel(), ee.ravel()
    x = (1 - ee) * (2 * mm - 1)
    nz, s_min, s0, s1 = scan_conditional_entropy(x, -x, 2 * ee - 1, ee, opts.grid_points, opts.tol)
    gap = np.minimum(s0, s1) - s_min
    theta = np.arccos(np.clip(nz, 0.0, 1.0))
    return [
        RegionCell(float(m), float(e), classify_analytic(x3_state(m=float(m), eps=float(e))), float(th), float(g))
        for m, e, th, g in zip(mm, ee, theta, gap)
    ]


def band_analysis(cells: list, margin: float = 0.05) -> dict:
    """Split scanned cells into sigma_x-like, sigma_z-like and intermediate.

    A cell is intermediate when ``theta_opt`` is more than ``margin`` away
    from both 0 and pi/2. Reports whether the intermediate cells form one
    connected band and whether any sigma_x cell touches a sigma_z cell.
    """
    from scipy import ndimage

    ms = sorted({c.m for c in cells})
    es = sorted({c.eps for c in cells})
    mi = {v: i for i, v in enumerate(ms)}
    ei = {v: i for i, v in enumerate(es)}
    label = np.zeros((len(ms), len(es)), dtype=int)  # 1 = x, 2 = z, 3 = band
    for c in cells:
        if c.theta_opt > math.pi / 2 - margin:
            v = 1
        elif c.theta_opt < margin:
            v = 2
        else:
            v = 3
        label[mi[c.m], ei[c.eps]] = v
    band = label == 3
    _, n_components = ndimage.label(band, structure=np.ones((3, 3)))
    xs, zs = label == 1, label == 2
    touching = bool(
        np.any(xs[1:, :] & zs[:-1, :]) or np.any(xs[:-1, :] & zs[1:, :])
        or np.any(xs[:, 1:] & zs[:, :-1]) or np.any(xs[:, :-1] & zs[:, 1:])
    )
    return {
        "n_sigma_x": int(xs.sum()),
        "n_sigma_z": int(zs.sum()),
        "n_band": int(band.sum()),
        "band_components": int(n_components),
        "x_touches_z": touching,
        "separated": bool(n_components == 1 and not touching and xs.any() and zs.any()),
    }


# -- X_m curve and J-D diagram ----------------------------------------------------


def xm_grid(points: int) -> list:
    """``points`` evenly spaced values of m in ``(0, 1/2]``, ending at 1/2."""
    if points < 1:
        raise ValueError("points must be >= 1")
    return [0.5 * k / points for k in range(1, points + 1)]


def _solve_xm_task(m, grid_points, tol):
    return solve_xm(m, MinimizeOptions(grid_points, tol, False))


def scan_xm_curve(m_grid, opts: MinimizeOptions | None = None, workers: int | None = None) -> list:
    """Solve the X_m curve at each m and return the rows in input order."""
    opts = opts or MinimizeOptions()
    workers = default_workers() if workers is None else workers
    items = [(float(m), opts.grid_points, opts.tol) for m in m_grid]
    return _map(_solve_xm_task, items, workers)


@dataclass(frozen=True)
class JdPoint:
    m: float
    eps: float
    mutual_information: float
    j0: float
    d0: float
    j_vn: float
    d_vn: float
    j_povm_lower: float
    d_povm_upper: float


JD_FIELDS = tuple(JdPoint.__dataclass_fields__)


def jd_diagram(points: list) -> list:
    """Classical correlation vs discord for three discord estimates along X_m.

    ``d0`` is the sigma_z/sigma_x-restricted value, ``d_vn`` the von Neumann
    optimum and ``d_povm_upper`` the three-outcome POVM bound. Each ``j`` is
    ``I - d``.
    """
    out = []
    for pt in points:
        state = x3_state(m=pt.m, eps=pt.eps)
        mi = mutual_information(state)
        d0 = discord_sigma_z(x3_params(pt.m, pt.eps))
        d_vn = d0 - pt.delta
        d_pu = d0 - pt.delta_tilde
        out.append(JdPoint(pt.m, pt.eps, mi, mi - d0, d0, mi - d_vn, d_vn, mi - d_pu, d_pu))
    return out


# -- random search ----------------------------------------------------------------


class SamplingError(RuntimeError):
    pass


def _physical_mask(x, y, t, s, u):
    return ((1 + t) ** 2 >= (x + y) ** 2 + (s - u) ** 2) & ((1 - t) ** 2 >= (x - y) ** 2 + (s + u) ** 2)


def sample_random_xstate(rng: np.random.Generator, constraint: str = "none") -> BlochParams:
    """Draw one valid X-state uniformly from the parameter cube by rejection."""
    _check_constraint(constraint)
    for _ in range(MAX_ATTEMPTS):
        x, y, t, s, u = rng.uniform(-1.0, 1.0, 5)
        if constraint == "s_equals_u":
            u = s
        if _physical_mask(x, y, t, s, u):
            return BlochParams(float(x), float(y), float(t), float(s), float(u))
    raise SamplingError(f"no valid state after {MAX_ATTEMPTS} attempts")


def sample_batch(rng: np.random.Generator, size: int, constraint: str = "none"):
    """Vectorised sampler with the same law as :func:`sample_random_xstate`.

    Returns ``(params, attempts)`` where ``params`` has shape ``(size, 5)``.
    """
    _check_constraint(constraint)
    chunks, have, attempts = [], 0, 0
    while have < size:
        draw = max(1024, 8 * (size - have))
        if attempts + draw > MAX_ATTEMPTS * max(1, size):
            raise SamplingError("rejection sampler exceeded its attempt budget")
        cand = rng.uniform(-1.0, 1.0, (draw, 5))
        if constraint == "s_equals_u":
            cand[:, 4] = cand[:, 3]
        ok = _physical_mask(*cand.T)
        acc = cand[ok]
        need = size - have
        if len(acc) > need:
            # Only count draws up to the last accepted one we keep.
            last = np.flatnonzero(ok)[need - 1]
            attempts += int(last) + 1
            acc = acc[:need]
        else:
            attempts += draw
        chunks.append(acc)
        have += len(acc)
    return np.concatenate(chunks), attempts


def _check_constraint(constraint):
    if constraint not in ("none", "s_equals_u"):
        raise ValueError(f"constraint must be 'none' or 's_equals_u', got {constraint!r}")


def canonical_arrays(params: np.ndarray):
    """Columns ``x, y, t, s`` with ``s`` replaced by ``max(|s|, |u|)``."""
    x, y, t, s, u = params.T
    return x, y, t, np.maximum(np.abs(s), np.abs(u))


def batch_gaps(params: np.ndarray, grid_points=201, tol=1e-12, batch=4096):
    """``min(D_sigma_z, D_sigma_x) - D_A`` and the optimal nz for each row."""
    x, y, t, s = canonical_arrays(params)
    gaps = np.empty(len(x))
    nzs = np.empty(len(x))
    for lo in range(0, len(x), batch):
        sl = slice(lo, lo + batch)
        nz, s_min, s0, s1 = scan_conditional_entropy(x[sl], y[sl], t[sl], s[sl], grid_points, tol)
        gaps[sl] = np.minimum(s0, s1) - s_min
        nzs[sl] = nz
    return gaps, nzs


def _search_chunk(seed, index, size, constraint, gap_tol, grid_points, tol):
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    params, attempts = sample_batch(rng, size, constraint)
    gaps, _ = batch_gaps(params, grid_points, tol)
    viol = gaps > gap_tol
    confirmed = 0
    if viol.any():
        fine_gaps, _ = batch_gaps(params[viol], 10 * (grid_points - 1) + 1, tol)
        confirmed = int(np.sum(fine_gaps >= gap_tol / 2))
    k = int(np.argmax(gaps))
    return {
        "samples": size,
        "attempts": attempts,
        "violations": int(viol.sum()),
        "confirmed": confirmed,
        "max_gap": float(gaps[k]),
        "max_params": [float(v) for v in params[k]],
    }


@dataclass
class SearchReport:
    samples: int
    violations: int
    violation_rate: float
    max_gap: float
    max_gap_params: BlochParams
    seed: int
    constraint: str = "s_equals_u"
    gap_tol: float = 1e-6
    attempts: int = 0
    acceptance_rate: float = 0.0
    confirmed_violations: int = 0
    probe_params: BlochParams = COUNTEREXAMPLE
    probe_gap: float = 0.0
    chunk_size: int = 0
    grid_points: int = 201
    sampling_law: str = SAMPLING_LAW
    caveat: str = SAMPLING_CAVEAT
    version: str = field(default=__version__)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_gap_params"] = self.max_gap_params.to_dict()
        d["probe_params"] = self.probe_params.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def probe_gap(params: BlochParams = COUNTEREXAMPLE, opts: MinimizeOptions | None = None) -> float:
    opts = opts or MinimizeOptions()
    gaps, _ = batch_gaps(np.array([params.as_tuple()]), opts.grid_points, opts.tol)
    return float(gaps[0])


def random_search(
    n: int,
    constraint: str = "s_equals_u",
    gap_tol: float = 1e-6,
    seed: int = 0,
    opts: MinimizeOptions | None = None,
    chunk_size: int = 50_000,
    workers: int | None = None,
) -> SearchReport:
    """Count random X-states for which neither sigma_z nor sigma_x is optimal.

    A sample is a violation when ``min(D_sigma_z, D_sigma_x)`` exceeds the
    scanned von Neumann discord by more than ``gap_tol`` bits. Violations are
    re-checked on a ten-times finer grid; ``confirmed_violations`` counts
    those whose gap stays above ``gap_tol / 2``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_constraint(constraint)
    opts = opts or MinimizeOptions()
    workers = default_workers() if workers is None else workers
    sizes = [min(chunk_size, n - lo) for lo in range(0, n, chunk_size)]
    items = [
        (seed, i, size, constraint, gap_tol, opts.grid_points, opts.tol) for i, size in enumerate(sizes)
    ]
    parts = _map(_search_chunk, items, workers)
    samples = sum(p["samples"] for p in parts)
    attempts = sum(p["attempts"] for p in parts)
    violations = sum(p["violations"] for p in parts)
    best = max(parts, key=lambda p: p["max_gap"])
    return SearchReport(
        samples=samples,
        violations=violations,
        violation_rate=violations / samples,
        max_gap=best["max_gap"],
        max_gap_params=BlochParams(*best["max_params"]),
        seed=seed,
        constraint=constraint,
        gap_tol=gap_tol,
        attempts=attempts,
        acceptance_rate=samples / attempts,
        confirmed_violations=sum(p["confirmed"] for p in parts),
        probe_gap=probe_gap(COUNTEREXAMPLE, opts),
        chunk_size=chunk_size,
        grid_points=opts.grid_points,
    )


# -- output -----------------------------------------------------------------------


def render_csv(rows, fields, metadata: dict | None = None) -> str:
    """CSV text with a ``# key: value`` metadata preamble and a header row."""
    buf = io.StringIO()
    meta = {"version": __version__}
    meta.update(metadata or {})
    for k in sorted(meta):
        buf.write(f"# {k}: {meta[k]}\n")
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        d = r.row() if hasattr(r, "row") else asdict(r)
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in d.items()})
    return buf.getvalue()


def read_csv(text: str) -> tuple:
    """Parse :func:`render_csv` output into ``(metadata, rows)``."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(": ")
            meta[k] = v
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))
