"""Built-in demonstration datasets: trajectories, scans, one parameter surface.

Each figure id maps to a fully specified run (protocol, coupling, initial
amplitudes, epoch, horizon).  Builders return plain data (column headers plus
row tuples, a plot description dict and a meta dict); serialization to files
lives in the cli module.  Trajectory figures carry a numeric-oracle overlay
(columns suffixed _num) next to the closed-form columns so the two solutions
can be compared point by point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import ScanSpec, default_horizon, exact_trajectory, run_scan, select_engine
from .core import AsyncTanhSech, SyncSech2, as_state
from .oracle import IntegratorConfig, integrate

__all__ = [
    "Dataset",
    "FigureData",
    "FIGURE_IDS",
    "figure_kind",
    "build_figure",
    "observable_columns",
    "amplitude_text",
]

_SQ2 = math.sqrt(2.0)

_IC_THIRD = (0.0, 0.0, 1.0, 0.0)
_IC_RAMP = (math.sqrt(0.1), math.sqrt(0.2), math.sqrt(0.3), math.sqrt(0.4))
_ICS_LR_MIX = (
    (0.0, 0.0, math.sqrt(3 / 8), math.sqrt(5 / 8)),
    (math.sqrt(1 / 8), math.sqrt(1 / 8), 0.5, math.sqrt(0.5)),
    (0.5, 0.5, math.sqrt(1 / 8), math.sqrt(3 / 8)),
    (0.5, math.sqrt(0.5), math.sqrt(1 / 8), math.sqrt(1 / 8)),
    (math.sqrt(3 / 8), math.sqrt(5 / 8), 0.0, 0.0),
)
_ICS_13 = (
    (0.0, 0.0, 1.0, 0.0),
    (0.5, 0.0, math.sqrt(3.0) / 2, 0.0),
    (1 / _SQ2, 0.0, 1 / _SQ2, 0.0),
    (math.sqrt(3.0) / 2, 0.0, 0.5, 0.0),
    (1.0, 0.0, 0.0, 0.0),
)
_ICS_14 = (
    (0.0, 0.0, 0.0, 1.0),
    (0.5, 0.0, 0.0, math.sqrt(3.0) / 2),
    (1 / _SQ2, 0.0, 0.0, 1 / _SQ2),
    (math.sqrt(3.0) / 2, 0.0, 0.0, 0.5),
    (1.0, 0.0, 0.0, 0.0),
)

# trajectory figures: coupling gamma, protocol parameters, initial states and
# the epoch at which they hold (0 = pulse center, -inf = infinite past)
_TRAJECTORIES = {
    "1d": dict(gamma=0.5, sync=(0.5, math.pi / 2, 1.0), epoch=0.0, ics=(_IC_THIRD,)),
    "1e": dict(gamma=1.0, sync=(0.0, 2.0, 1.0), epoch=0.0, ics=(_IC_THIRD,)),
    "1f": dict(gamma=0.35, sync=(0.0, math.pi / 2, 1.0), epoch=0.0, ics=(_IC_THIRD,)),
    "2a": dict(gamma=0.15, sync=(0.0, math.pi / 2, 1.0), epoch=-math.inf, ics=(_IC_RAMP,)),
    "2b": dict(gamma=0.15, sync=(0.0, math.pi / 4, 1.0), epoch=-math.inf, ics=_ICS_LR_MIX),
    "2c": dict(gamma=0.25, sync=(0.0, math.pi / 4, 1.0), epoch=-math.inf, ics=(_IC_THIRD,)),
    "3a": dict(gamma=2.0, asynchronous=(1.0, 1.0, 1.0), epoch=-math.inf, ics=_ICS_13),
    "3b": dict(gamma=2.0, asynchronous=(1.0, 1.0, 2.0), epoch=-math.inf, ics=_ICS_13),
    "3d": dict(
        gamma=0.5,
        asynchronous=(math.sqrt(0.21), 0.5, 0.4),
        epoch=-math.inf,
        ics=_ICS_14,
    ),
}

_SCANS = {
    "1a": dict(
        swept="beta",
        bounds=(0.0, 4.0),
        fixed=dict(gamma=0.5, V=math.pi / 2, Omega=1.0),
    ),
    "1b": dict(
        swept="V_over_Omega",
        bounds=(0.0, 8.0),
        fixed=dict(gamma=1.0, beta=0.0, Omega=1.0),
    ),
    "1c": dict(
        swept="gamma",
        bounds=(0.0, 2.0),
        fixed=dict(beta=0.0, V=math.pi / 2, Omega=1.0),
    ),
}

FIGURE_IDS = ("1a", "1b", "1c", "1d", "1e", "1f", "2a", "2b", "2c", "3a", "3b", "3c", "3d")

_TRAJ_HEADER = ("t", "P1", "P2", "P3", "P4", "Z31", "Z32", "ZLR", "norm2")
_NUM_HEADER = tuple(name + "_num" for name in _TRAJ_HEADER[1:])


@dataclass(frozen=True)
class Dataset:
    """One CSV-able table: column names plus row tuples."""

    name: str
    header: tuple
    rows: tuple


@dataclass(frozen=True)
class FigureData:
    id: str
    kind: str
    datasets: tuple
    plot: dict
    meta: dict


def figure_kind(fig_id):
    if fig_id in _TRAJECTORIES:
        return "trajectory"
    if fig_id in _SCANS:
        return "scan"
    if fig_id == "3c":
        return "surface"
    raise ValueError(f"unknown figure id {fig_id!r}; known ids: {', '.join(FIGURE_IDS)}")


def _figure_protocol(cfg):
    if "sync" in cfg:
        return SyncSech2(*cfg["sync"])
    return AsyncTanhSech(*cfg["asynchronous"])


def observable_columns(states):
    """P1..P4, Z31, Z32, ZLR and norm^2 columns from an (n, 4) amplitude array."""
    p = np.abs(states) ** 2
    z31 = p[:, 2] - p[:, 0]
    z32 = p[:, 2] - p[:, 1]
    zlr = (p[:, 2] + p[:, 3]) - (p[:, 0] + p[:, 1])
    return [p[:, 0], p[:, 1], p[:, 2], p[:, 3], z31, z32, zlr, p.sum(axis=1)]


def amplitude_text(state):
    """Flat re,im;re,im;... rendering of a length-4 amplitude vector."""
    return ";".join(f"{z.real:.17g},{z.imag:.17g}" for z in np.asarray(state, complex))


def _build_trajectory(fig_id, samples, horizon):
    cfg = _TRAJECTORIES[fig_id]
    protocol = _figure_protocol(cfg)
    gamma = cfg["gamma"]
    epoch = cfg["epoch"]
    T = default_horizon(protocol) if horizon is None else float(horizon)
    t_lo = 0.0 if epoch == 0.0 else -T
    times = np.linspace(t_lo, T, samples)
    engine = select_engine(protocol, gamma)

    datasets = []
    oracle_ids = []
    for k, ic in enumerate(cfg["ics"]):
        state0 = as_state(ic)
        states = exact_trajectory(protocol, gamma, state0, epoch, times)
        columns = [times] + observable_columns(states)
        # the oracle is restarted from the closed-form state at the first
        # sample so both solutions share the same finite-time anchor
        ocfg = IntegratorConfig(t_start=times[0], t_end=times[-1])
        traj = integrate(gamma, protocol, states[0], ocfg, times)
        columns += observable_columns(traj.states)
        oracle_ids.append(traj.solver_id)
        name = fig_id if len(cfg["ics"]) == 1 else f"{fig_id}_ic{k + 1}"
        table = np.column_stack(columns)
        datasets.append(Dataset(name, _TRAJ_HEADER + _NUM_HEADER, tuple(map(tuple, table))))

    plot = {
        "title": f"figure {fig_id}: populations and imbalances vs time",
        "x_label": "t",
        "y_label": "population / imbalance",
        "series": {name: name for name in _TRAJ_HEADER[1:]},
        "overlay_series": {name: name for name in _NUM_HEADER},
        "files": [f"{d.name}_data.csv" for d in datasets],
    }
    meta = {
        "figure": fig_id,
        "kind": "trajectory",
        "engine": engine,
        "oracle": oracle_ids[0],
        "gamma": f"{gamma:.17g}",
        "epoch": "-inf" if epoch == -math.inf else f"{epoch:.17g}",
        "horizon": f"{T:.17g}",
        "samples": str(samples),
    }
    if isinstance(protocol, SyncSech2):
        meta.update(
            protocol="sync",
            beta=f"{protocol.beta:.17g}",
            V=f"{protocol.V:.17g}",
            Omega=f"{protocol.Omega:.17g}",
        )
    else:
        meta.update(
            protocol="async",
            epsilon=f"{protocol.epsilon_amp:.17g}",
            upsilon=f"{protocol.upsilon_amp:.17g}",
            chi=f"{protocol.chi:.17g}",
        )
    for k, ic in enumerate(cfg["ics"]):
        meta[f"ic{k + 1}"] = amplitude_text(ic)
    return FigureData(fig_id, "trajectory", tuple(datasets), plot, meta)


def _build_scan(fig_id, samples):
    cfg = _SCANS[fig_id]
    lo, hi = cfg["bounds"]
    spec = ScanSpec(
        swept=cfg["swept"],
        grid=np.linspace(lo, hi, samples),
        fixed=cfg["fixed"],
        state0=_IC_THIRD,
        epoch=0.0,
        observables=((3, 1), (3, 2)),
    )
    result = run_scan(spec)
    rows = tuple(
        (row.param, row.values[0], row.values[1], row.engine) for row in result.rows
    )
    datasets = (Dataset(fig_id, ("param", "Z31_inf", "Z32_inf", "engine"), rows),)
    plot = {
        "title": f"figure {fig_id}: asymptotic imbalances vs {spec.swept}",
        "x_label": spec.swept,
        "y_label": "asymptotic imbalance",
        "series": {"Z31_inf": "Z31_inf", "Z32_inf": "Z32_inf"},
        "files": [f"{fig_id}_data.csv"],
    }
    meta = {
        "figure": fig_id,
        "kind": "scan",
        "swept": spec.swept,
        "grid": f"{lo:.17g}:{hi:.17g}:{samples}",
        "epoch": "0",
        "ic": amplitude_text(_IC_THIRD),
    }
    for key in sorted(cfg["fixed"]):
        meta[key] = f"{cfg['fixed'][key]:.17g}"
    failures = [row for row in result.rows if row.error is not None]
    for k, row in enumerate(failures):
        meta[f"failure_{k}"] = f"{row.param:.17g}: {row.error}"
    return FigureData(fig_id, "scan", datasets, plot, meta)


def _build_surface(samples):
    """Spin-flip solvability surface upsilon = sqrt(chi^2/4 + epsilon^2)."""
    chi_grid = np.linspace(0.0, 2.0, samples)
    eps_grid = np.linspace(0.0, 2.0, samples)
    rows = []
    for chi in chi_grid:
        for eps in eps_grid:
            rows.append((chi, eps, math.hypot(0.5 * chi, eps)))
    datasets = (Dataset("3c", ("chi", "epsilon", "upsilon"), tuple(rows)),)
    plot = {
        "title": "figure 3c: spin-flip closed-form surface",
        "x_label": "chi",
        "y_label": "epsilon",
        "z_label": "upsilon",
        "files": ["3c_data.csv"],
    }
    meta = {
        "figure": "3c",
        "kind": "surface",
        "grid": f"0:2:{samples} x 0:2:{samples}",
        "relation": "upsilon = sqrt(chi^2/4 + epsilon^2)",
    }
    return FigureData("3c", "surface", datasets, plot, meta)


def build_figure(fig_id, samples=None, horizon=None):
    """Assemble the dataset bundle for one figure id.

    samples defaults to 2001 for trajectories, 401 for scans and 41 per axis
    for the surface; horizon (trajectories only) overrides the default
    envelope-decay horizon.
    """
    kind = figure_kind(fig_id)
    if kind == "trajectory":
        return _build_trajectory(fig_id, 2001 if samples is None else int(samples), horizon)
    if horizon is not None:
        raise ValueError(f"figure {fig_id} has no time horizon to override")
    if kind == "scan":
        return _build_scan(fig_id, 401 if samples is None else int(samples))
    return _build_surface(41 if samples is None else int(samples))
