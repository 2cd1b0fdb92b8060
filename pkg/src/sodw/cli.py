"""Command-line front end: figure datasets, evolutions, scans, classification.

Outputs are deterministic flat files: `<name>_data.csv` with 17-significant-
digit numbers, a `<name>_plot.json` description (title, axis labels, series
to column map) and a `<name>_meta` key=value file naming every parameter,
engine and tolerance needed to re-run.  No timestamps anywhere, so identical
invocations produce byte-identical files.  The default output directory is
`SODW_OUT` from the environment, falling back to the working directory.

Config files are flat key=value lines (# starts a comment); command-line
flags override config values.  Note argparse needs `--epoch=-inf` (with the
equals sign) for negative non-numeric-looking values.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import acceptance
from .analysis import (
    ENGINE_ORACLE,
    ScanSpec,
    default_horizon,
    exact_trajectory,
    off_branch_reason,
    run_scan,
    select_engine,
)
from .asynchronous import FLIP_CONSTRAINT_TOL, check_flip_constraint, classify_async_conserving
from .core import AsyncTanhSech, SyncSech2, as_state
from .figures import FIGURE_IDS, amplitude_text, build_figure, observable_columns
from .oracle import IntegratorConfig, integrate
from .sync import classify_sync_condition

_TRAJ_HEADER = ("t", "P1", "P2", "P3", "P4", "Z31", "Z32", "ZLR", "norm2")
_NUM_HEADER = tuple(name + "_num" for name in _TRAJ_HEADER[1:])


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_plot(path, plot):
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(plot, sort_keys=True, indent=2) + "\n")


def _write_meta(path, meta):
    with open(path, "w", newline="\n") as fh:
        for key, value in meta.items():
            fh.write(f"{key}={value}\n")


def _out_dir(arg):
    out = arg or os.environ.get("SODW_OUT") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _read_config(path):
    cfg = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line (expected key=value): {line!r}")
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def _setting(cfg, args, key, default=None):
    """Config value for key, overridden by an identically named flag."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in cfg:
        return cfg[key]
    return default


def _float_setting(cfg, args, key, default=None):
    value = _setting(cfg, args, key, default)
    return value if value is None else float(value)


def _parse_amplitudes(cfg):
    amps = [
        complex(float(cfg.get(f"a{k}_re", 0.0)), float(cfg.get(f"a{k}_im", 0.0)))
        for k in (1, 2, 3, 4)
    ]
    if not any(abs(a) > 0 for a in amps):
        amps = [0j, 0j, 1 + 0j, 0j]
    state0 = as_state(amps)
    norm_gap = abs(float(np.sum(np.abs(state0) ** 2)) - 1.0)
    if norm_gap > 1e-6:
        raise SystemExit(
            f"initial amplitudes rejected: |norm^2 - 1| = {norm_gap:.3g} exceeds 1e-6"
        )
    return state0


def _cmd_figure(args):
    out = _out_dir(args.out)
    data = build_figure(args.id, samples=args.grid, horizon=args.horizon)
    written = []
    for ds in data.datasets:
        path = os.path.join(out, f"{ds.name}_data.csv")
        _write_csv(path, ds.header, ds.rows)
        written.append(path)
    plot_path = os.path.join(out, f"{data.id}_plot.json")
    _write_plot(plot_path, data.plot)
    meta_path = os.path.join(out, f"{data.id}_meta")
    _write_meta(meta_path, data.meta)
    for path in written + [plot_path, meta_path]:
        print(path)
    return 0


def _cmd_evolve(args):
    cfg = _read_config(args.config) if args.config else {}
    kind = args.protocol or cfg.get("protocol")
    if kind not in ("sync", "async"):
        raise SystemExit("evolve needs protocol=sync or protocol=async (config or --protocol)")
    gamma = _float_setting(cfg, args, "gamma")
    if gamma is None:
        raise SystemExit("evolve needs gamma (config or --gamma)")
    if kind == "sync":
        protocol = SyncSech2(
            _float_setting(cfg, args, "beta", 0.0),
            _float_setting(cfg, args, "V", math.pi / 2),
            _float_setting(cfg, args, "Omega", 1.0),
        )
    else:
        protocol = AsyncTanhSech(
            _float_setting(cfg, args, "epsilon", 0.0),
            _float_setting(cfg, args, "upsilon", 1.0),
            _float_setting(cfg, args, "chi", 1.0),
        )
    state0 = _parse_amplitudes(cfg)
    epoch = _float_setting(cfg, args, "epoch", -math.inf)
    horizon = _float_setting(cfg, args, "horizon")
    if horizon is None:
        horizon = default_horizon(protocol)
    grid_n = int(_setting(cfg, args, "grid", 2001))
    label = _setting(cfg, args, "label", "run")
    out = _out_dir(_setting(cfg, args, "out"))

    if math.isinf(epoch):
        times = np.linspace(-horizon, horizon, grid_n)
    else:
        times = np.linspace(epoch, epoch + horizon, grid_n)
    on_branch = select_engine(protocol, gamma) != ENGINE_ORACLE
    engine = args.engine or ("exact" if on_branch else "oracle")
    if engine in ("exact", "both") and not on_branch:
        print("cannot use the exact engine: " + off_branch_reason(protocol, gamma), file=sys.stderr)
        return 2

    header = list(_TRAJ_HEADER)
    columns = [times]
    meta = {"label": label, "engine": engine, "protocol": kind, "gamma": _fmt(gamma)}
    if kind == "sync":
        meta.update(beta=_fmt(protocol.beta), V=_fmt(protocol.V), Omega=_fmt(protocol.Omega))
    else:
        meta.update(
            epsilon=_fmt(protocol.epsilon_amp),
            upsilon=_fmt(protocol.upsilon_amp),
            chi=_fmt(protocol.chi),
        )
    meta.update(
        epoch="-inf" if math.isinf(epoch) else _fmt(epoch),
        horizon=_fmt(horizon),
        grid=str(grid_n),
        ic=amplitude_text(state0),
    )

    ana = None
    if engine in ("exact", "both"):
        ana = exact_trajectory(protocol, gamma, state0, epoch, times)
        columns += observable_columns(ana)
    if engine in ("oracle", "both"):
        start_state = state0 if ana is None else ana[0]
        ocfg = IntegratorConfig(t_start=times[0], t_end=times[-1])
        traj = integrate(gamma, protocol, start_state, ocfg, times)
        columns += observable_columns(traj.states)
        meta["oracle"] = traj.solver_id
        if engine == "both":
            header += list(_NUM_HEADER)
            deviation = float(np.max(np.linalg.norm(ana - traj.states, axis=1)))
            meta["max_deviation"] = _fmt(deviation)

    csv_path = os.path.join(out, f"{label}_data.csv")
    _write_csv(csv_path, header, map(tuple, np.column_stack(columns)))
    plot = {
        "title": f"{label}: populations and imbalances vs time",
        "x_label": "t",
        "y_label": "population / imbalance",
        "series": {name: name for name in header[1:]},
        "files": [f"{label}_data.csv"],
    }
    plot_path = os.path.join(out, f"{label}_plot.json")
    _write_plot(plot_path, plot)
    meta_path = os.path.join(out, f"{label}_meta")
    _write_meta(meta_path, meta)
    for path in (csv_path, plot_path, meta_path):
        print(path)
    return 0


def _cmd_scan(args):
    cfg = _read_config(args.config)
    if "swept" not in cfg:
        raise SystemExit("scan config needs swept=<beta|V_over_Omega|gamma|upsilon_over_chi>")
    lo = float(cfg.get("grid_lo", 0.0))
    hi = float(cfg.get("grid_hi", 1.0))
    n = int(cfg.get("grid_n", 401))
    fixed = {
        key: float(cfg[key])
        for key in ("gamma", "beta", "V", "Omega", "epsilon", "upsilon", "chi")
        if key in cfg
    }
    state0 = _parse_amplitudes(cfg)
    epoch = float(cfg.get("epoch", 0.0))
    observables = []
    names = []
    for token in cfg.get("observables", "31,32").split(","):
        token = token.strip()
        if len(token) != 2:
            raise SystemExit(f"bad observable token {token!r} (want pairs like 31 or LR)")
        observables.append(tuple(int(ch) if ch.isdigit() else ch.upper() for ch in token))
        names.append(f"Z{token.upper()}_inf")
    spec = ScanSpec(cfg["swept"], np.linspace(lo, hi, n), fixed, state0, epoch, tuple(observables))
    result = run_scan(spec)

    label = cfg.get("label", "scan")
    out = _out_dir(args.out or cfg.get("out"))
    csv_path = os.path.join(out, f"{label}_data.csv")
    rows = [(row.param, *row.values, row.engine) for row in result.rows]
    _write_csv(csv_path, ["param"] + names + ["engine"], rows)
    plot = {
        "title": f"{label}: asymptotic imbalances vs {spec.swept}",
        "x_label": spec.swept,
        "y_label": "asymptotic imbalance",
        "series": {name: name for name in names},
        "files": [f"{label}_data.csv"],
    }
    plot_path = os.path.join(out, f"{label}_plot.json")
    _write_plot(plot_path, plot)
    meta = {
        "label": label,
        "kind": "scan",
        "swept": spec.swept,
        "grid": f"{lo:.17g}:{hi:.17g}:{n}",
        "epoch": "-inf" if math.isinf(epoch) else _fmt(epoch),
        "ic": amplitude_text(state0),
    }
    for key in sorted(fixed):
        meta[key] = _fmt(fixed[key])
    for k, row in enumerate(r for r in result.rows if r.error is not None):
        meta[f"failure_{k}"] = f"{row.param:.17g}: {row.error}"
    meta_path = os.path.join(out, f"{label}_meta")
    _write_meta(meta_path, meta)
    for path in (csv_path, plot_path, meta_path):
        print(path)
    return 0


def _cmd_classify(args):
    printed = False
    if args.V is not None and args.Omega is not None:
        cond = classify_sync_condition(args.beta or 0.0, args.V, args.Omega)
        if cond.kind == "neither":
            print(
                "sync: neither CCPC nor CCPI "
                f"(pulse-area ratio {cond.ratio:.6g}, nearest residual {cond.grid_residual:.3g})"
            )
        else:
            print(
                f"sync: {cond.kind} n={cond.n} "
                f"(beta residual {cond.beta_residual:.3g}, grid residual {cond.grid_residual:.3g})"
            )
        printed = True
    if args.upsilon is not None and args.chi is not None:
        cond = classify_async_conserving(args.upsilon, args.chi)
        if cond.kind == "neither":
            print(
                "async (spin-conserving): neither CCPC nor CCPI "
                f"(sin(pi*upsilon/chi) = {cond.sin_val:.3g}, cos = {cond.cos_val:.3g})"
            )
        else:
            print(f"{cond.kind} (async, spin-conserving)")
        if args.epsilon is not None:
            residual = check_flip_constraint(args.epsilon, args.upsilon, args.chi)
            state = "satisfied" if abs(residual) <= FLIP_CONSTRAINT_TOL else "violated"
            residual_text = "0" if abs(residual) < 1e-12 else f"{residual:.6g}"
            print(f"flip-constraint {state}, residual {residual_text}")
        printed = True
    if not printed:
        print(
            "nothing to classify: give --V and --Omega (sync) and/or --upsilon and --chi "
            "(async; add --epsilon for the flip constraint)",
            file=sys.stderr,
        )
        return 2
    return 0


def _cmd_verify(args):
    ids = None
    if args.criteria:
        ids = {int(token) for token in args.criteria.replace(",", " ").split()}
    records = acceptance.run_all(ids)
    if not records:
        print("no matching criteria", file=sys.stderr)
        return 2
    for record in records:
        print(acceptance.format_record(record))
    n_pass = sum(record["passed"] for record in records)
    print(f"{n_pass}/{len(records)} criteria passed")
    return 0 if n_pass == len(records) else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sodw",
        description="exact and numerical dynamics of a driven four-level double well",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="write a built-in demonstration dataset")
    fig.add_argument("--id", required=True, choices=FIGURE_IDS)
    fig.add_argument("--out", help="output directory (default: $SODW_OUT or .)")
    fig.add_argument("--grid", type=int, help="sample count (per axis for the surface)")
    fig.add_argument("--horizon", type=float, help="trajectory horizon override")
    fig.set_defaults(func=_cmd_figure)

    ev = sub.add_parser("evolve", help="evolve one initial state and write the trajectory")
    ev.add_argument("--config", help="flat key=value file; flags override")
    ev.add_argument("--engine", choices=("exact", "oracle", "both"))
    ev.add_argument("--protocol", choices=("sync", "async"))
    for name in ("gamma", "beta", "V", "Omega", "epsilon", "upsilon", "chi", "epoch", "horizon"):
        ev.add_argument(f"--{name}", type=float)
    ev.add_argument("--grid", type=int)
    ev.add_argument("--label")
    ev.add_argument("--out")
    ev.set_defaults(func=_cmd_evolve)

    sc = sub.add_parser("scan", help="sweep one parameter and record asymptotic imbalances")
    sc.add_argument("--config", required=True)
    sc.add_argument("--out")
    sc.set_defaults(func=_cmd_scan)

    cl = sub.add_parser("classify", help="name the transfer condition for given parameters")
    for name in ("beta", "V", "Omega", "epsilon", "upsilon", "chi"):
        cl.add_argument(f"--{name}", type=float)
    cl.set_defaults(func=_cmd_classify)

    ver = sub.add_parser("verify", help="run the acceptance checks, one line per criterion")
    ver.add_argument("--criteria", help="comma-separated criterion ids (default: all)")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
