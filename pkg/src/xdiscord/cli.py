"""Command-line front end.

Examples::

    xdiscord compute --x3 0.3,0.2
    xdiscord compute --params -0.8812,0.9407,-0.9383,0.2898,0.2898
    xdiscord region-map --window fig2 -o map.csv
    xdiscord xm-curve --points 201 -o xm.csv
    xdiscord jd-diagram -o jd.csv
    xdiscord search -n 1000000 --seed 7 -o search.json

Exit codes: 0 success, 2 invalid input or configuration, 3 no root on the
X_m curve.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .discord_vn import (
    MinimizeOptions,
    classify_analytic,
    discord_sigma_x,
    discord_sigma_z,
    minimize_discord_vn,
)
from .explorer import (
    JD_FIELDS,
    REGION_FIELDS,
    WINDOWS,
    band_analysis,
    default_workers,
    jd_diagram,
    random_search,
    region_map,
    render_csv,
    scan_xm_curve,
    xm_grid,
)
from .families import CSV_FIELDS as XM_FIELDS
from .families import NoRoot, X3Params, x3_state
from .povm import discord_upper_povm
from .xcore import BlochParams, DomainError, InvalidState, RawXState, as_params, canonicalize

FULL_SEARCH_N = 50_000_000


class UsageError(Exception):
    pass


def _floats(text: str, count: int, name: str) -> list:
    try:
        vals = [float(v) for v in str(text).split(",")]
    except ValueError:
        raise UsageError(f"{name} expects {count} comma-separated numbers, got {text!r}")
    if len(vals) != count:
        raise UsageError(f"{name} expects {count} comma-separated numbers, got {len(vals)}")
    return vals


def _load_json_arg(text: str):
    path = Path(text)
    if not text.lstrip().startswith(("{", "[")) and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"could not parse state JSON: {exc}")


def _state_from_args(args):
    if args.x3:
        m, eps = _floats(args.x3, 2, "--x3")
        return as_params(x3_state(X3Params(m, eps)))
    if args.params:
        return as_params(BlochParams(*_floats(args.params, 5, "--params")))
    data = _load_json_arg(args.state)
    if not isinstance(data, dict):
        raise UsageError("state JSON must be an object")
    if "rho00" in data:
        return as_params(canonicalize(RawXState.from_dict(data)))
    if "x" in data:
        return as_params(BlochParams.from_dict(data))
    raise UsageError("state JSON needs either rho00..rho33 (+rho03, rho12) or x, y, t, s, u")


def _opts(args) -> MinimizeOptions:
    return MinimizeOptions(
        grid_points=args.scan_points, tol=args.tol, fast_path=not args.force_scan
    )


def _emit(args, text: str, summary: str):
    if args.output:
        out = Path(args.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def cmd_compute(args) -> int:
    p = _state_from_args(args)
    opts = _opts(args)
    res = minimize_discord_vn(p, opts)
    dz, dx = discord_sigma_z(p), discord_sigma_x(p)
    out = res.to_dict()
    out.update(
        {
            "analytic_class": classify_analytic(p).value,
            "discord_sigma_z": dz,
            "discord_sigma_x": dx,
            "gap": min(dz, dx) - res.discord,
            "discord_povm_upper": discord_upper_povm(p, opts).discord,
            "params": p.to_dict(),
        }
    )
    print(json.dumps(out, indent=2))
    return 0


def _meta(args, **extra) -> dict:
    meta = {
        "command": args.command,
        "scan_points": args.scan_points,
        "tol": args.tol,
    }
    meta.update(extra)
    return meta


def _render(args, rows, fields, meta) -> str:
    if args.format == "json":
        return json.dumps(
            {"metadata": meta, "rows": [r.row() if hasattr(r, "row") else asdict(r) for r in rows]},
            indent=2,
        ) + "\n"
    return render_csv(rows, fields, meta)


def cmd_region_map(args) -> int:
    window = args.window or "fig1"
    if window not in WINDOWS:
        raise UsageError(f"region-map supports --window {'|'.join(WINDOWS)}, got {window!r}")
    m_range, eps_range = WINDOWS[window]
    if args.m_range:
        m_range = tuple(_floats(args.m_range, 2, "--m-range"))
    if args.eps_range:
        eps_range = tuple(_floats(args.eps_range, 2, "--eps-range"))
    grid = args.grid or ("40" if window == "fig2" else "50")
    try:
        shape = tuple(int(v) for v in grid.lower().split("x"))
    except ValueError:
        raise UsageError(f"--grid expects N or NxM, got {grid!r}")
    if len(shape) == 1:
        shape = shape * 2
    if len(shape) != 2 or min(shape) < 1:
        raise UsageError(f"--grid expects N or NxM, got {grid!r}")
    try:
        cells = region_map(m_range, eps_range, shape, _opts(args))
    except DomainError as exc:
        raise UsageError(str(exc))
    band = band_analysis(cells)
    meta = _meta(args, window=window, m_range=list(m_range), eps_range=list(eps_range), grid=list(shape))
    summary = (
        f"rows={len(cells)} sigma_x={band['n_sigma_x']} sigma_z={band['n_sigma_z']} "
        f"intermediate={band['n_band']} separated={band['separated']}"
    )
    _emit(args, _render(args, cells, REGION_FIELDS, meta), summary)
    return 0


def _xm_points(args):
    if args.window not in (None, "fig3", "fig4"):
        raise UsageError(f"--window {args.window} is not an X_m preset (use fig3 or fig4)")
    return scan_xm_curve(xm_grid(args.points), _opts(args), args.workers)


def cmd_xm_curve(args) -> int:
    pts = _xm_points(args)
    best = max(pts, key=lambda p: p.delta)
    summary = f"rows={len(pts)} max_delta={best.delta:.6e} at eps={best.eps:.6f} (m={best.m:.6f})"
    _emit(args, _render(args, pts, XM_FIELDS, _meta(args, points=args.points)), summary)
    return 0


def cmd_jd_diagram(args) -> int:
    rows = jd_diagram(_xm_points(args))
    shift = max(r.d0 - r.d_povm_upper for r in rows)
    summary = f"rows={len(rows)} max_povm_shift={shift:.6e}"
    _emit(args, _render(args, rows, JD_FIELDS, _meta(args, points=args.points)), summary)
    return 0


def cmd_search(args) -> int:
    n = FULL_SEARCH_N if args.full else args.n
    if n < 1:
        raise UsageError("n must be >= 1")
    report = random_search(
        n,
        constraint=args.constraint,
        gap_tol=args.gap_tol,
        seed=args.seed,
        opts=_opts(args),
        chunk_size=args.chunk_size,
        workers=args.workers,
    )
    summary = (
        f"samples={report.samples} violations={report.violations} "
        f"violation_rate={100 * report.violation_rate:.4f}% max_gap={report.max_gap:.6f} "
        f"probe_gap={report.probe_gap:.6f}"
    )
    if args.format == "csv":
        d = report.to_dict()
        flat = {k: v for k, v in d.items() if not isinstance(v, dict)}
        for k in ("max_gap_params", "probe_params"):
            for kk, vv in d[k].items():
                flat[f"{k}.{kk}"] = vv

        class _Row:
            def row(self):
                return flat

        text = render_csv([_Row()], list(flat), {"command": "search"})
    else:
        text = report.to_json() + "\n"
    _emit(args, text, summary)
    return 0


COMMANDS = {
    "compute": cmd_compute,
    "region-map": cmd_region_map,
    "xm-curve": cmd_xm_curve,
    "jd-diagram": cmd_jd_diagram,
    "search": cmd_search,
}


def _add_common(p: argparse.ArgumentParser, files: bool = True):
    p.add_argument("--config", help="JSON file of option defaults; command-line flags win")
    p.add_argument("--scan-points", type=int, default=201, help="coarse grid size for the nz scan (default 201)")
    p.add_argument("--tol", type=float, default=1e-12, help="golden-section tolerance in nz (default 1e-12)")
    p.add_argument("--force-scan", action="store_true", help="skip the analytic fast path")
    if files:
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
        p.add_argument("--window", choices=("fig1", "fig2", "fig3", "fig4"), help="parameter preset")
        p.add_argument(
            "--workers", type=int, default=None,
            help="worker processes (default: $XDISCORD_WORKERS or 1)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xdiscord", description="Quantum discord of two-qubit X-states.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="discord of one state, printed as JSON")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--state", help="state as inline JSON or a JSON file (rho.. or x,y,t,s,u keys)")
    src.add_argument("--x3", metavar="M,EPS", help="the X3(m, eps) family member")
    src.add_argument("--params", metavar="X,Y,T,S,U", help="Bloch parameters")
    _add_common(p, files=False)

    p = sub.add_parser("region-map", help="classification and optimal angle over an (m, eps) grid")
    p.add_argument("--grid", help="grid size N or NxM (default 50, or 40 for fig2)")
    p.add_argument("--m-range", metavar="LO,HI", help="override the window's m range")
    p.add_argument("--eps-range", metavar="LO,HI", help="override the window's eps range")
    _add_common(p)

    for name, helptext in (
        ("xm-curve", "solve the X_m curve: m, eps, theta_opt, delta, delta_tilde"),
        ("jd-diagram", "classical correlation vs discord along X_m"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--points", type=int, default=201, help="number of m values in (0, 1/2] (default 201)")
        _add_common(p)

    p = sub.add_parser("search", help="random search for states where sigma_x and sigma_z both fail")
    p.add_argument("-n", type=int, default=1_000_000, help="number of accepted samples (default 1e6)")
    p.add_argument("--full", action="store_true", help=f"run {FULL_SEARCH_N:.0e} samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--constraint", choices=("none", "s_equals_u"), default="s_equals_u")
    p.add_argument("--gap-tol", type=float, default=1e-6, help="violation threshold in bits (default 1e-6)")
    p.add_argument("--chunk-size", type=int, default=50_000, help="samples per independently seeded chunk")
    _add_common(p)
    p.set_defaults(format="json")
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"could not read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(k.replace("-", "_") for k in cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    subparser.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def _join_negative_values(argv):
    # "--params -0.88,..." would otherwise be read as an unknown flag.
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


_VALUE_FLAGS = ("--params", "--x3", "--m-range", "--eps-range")


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = _apply_config(parser, argv)
        if getattr(args, "workers", None) is None and hasattr(args, "workers"):
            args.workers = default_workers()
        return COMMANDS[args.command](args)
    except (UsageError, InvalidState, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
