"""Independent numerical integration of the raw four-level equations.

This module never touches the analytic engines: it integrates
i*da/dt = H(t)*a directly with adaptive embedded Runge-Kutta schemes from
scipy (DOP853 by default, RK45 selectable) or a handwritten fixed-step
classical RK4 fallback, and is the verification oracle for every exact
solution as well as the only solver for parameters off the analytic branches.
The problem is not stiff (the matrix entries are bounded by the drive
amplitudes), so explicit methods are the right tool.

Sampled times are exactly the requested grid values (scipy's t_eval, or RK4
sub-stepping that lands on each grid point), never nearest-step substitutes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from .core import as_coupling, as_state, hamiltonian_matrix, populations

__all__ = [
    "IntegratorConfig",
    "TrajectoryRecord",
    "integrate",
    "compare_to_analytic",
]

_METHODS = {"dop853": "DOP853", "rk45": "RK45", "rk4": None}


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration window, tolerances and method tag.

    method is one of "dop853" / "rk45" (adaptive embedded Runge-Kutta) or
    "rk4" (fixed-step classical 4th order; then max_step is the step size and
    must be finite).
    """

    t_start: float
    t_end: float
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    method: str = "dop853"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError(
                f"tolerances must be > 0, got rel_tol={self.rel_tol}, abs_tol={self.abs_tol}"
            )
        if not (self.t_end > self.t_start):
            raise ValueError(f"need t_end > t_start, got [{self.t_start}, {self.t_end}]")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {sorted(_METHODS)}, got {self.method!r}")
        if self.method == "rk4" and not (0 < self.max_step < math.inf):
            raise ValueError("fixed-step rk4 needs a finite positive max_step")


@dataclass(frozen=True)
class TrajectoryRecord:
    """Sampled trajectory tagged with the solver that produced it.

    states has shape (len(times), 4); norm_drift_max is the largest deviation
    of norm^2 from its initial value over the samples.
    """

    times: np.ndarray
    states: np.ndarray
    protocol: object
    solver_id: str
    norm_drift_max: float = field(init=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=complex)
        if states.shape != (times.size, 4):
            raise ValueError(f"states shape {states.shape} does not match {times.size} times")
        if times.size and np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        norms = np.sum(np.abs(states) ** 2, axis=1)
        drift = float(np.max(np.abs(norms - norms[0]))) if times.size else 0.0
        object.__setattr__(self, "norm_drift_max", drift)

    @cached_property
    def population_array(self):
        return np.abs(self.states) ** 2

    @cached_property
    def norms(self):
        return np.sum(self.population_array, axis=1)

    def snapshot(self, k):
        return populations(self.states[k], self.times[k])

    @property
    def snapshots(self):
        return [self.snapshot(k) for k in range(self.times.size)]


def _rhs_factory(gamma, protocol):
    g = as_coupling(gamma)
    coupling = hamiltonian_matrix(g, 1.0, 0.0)
    zeeman_signs = np.array([1.0, -1.0, 1.0, -1.0])

    def rhs(t, a):
        ups = float(protocol.upsilon(t))
        eps = float(protocol.epsilon(t))
        return -1j * (eps * zeeman_signs * a + ups * (coupling @ a))

    return rhs


def _integrate_rk4(rhs, y0, sample_grid, h_max):
    states = np.empty((sample_grid.size, 4), dtype=complex)
    states[0] = y0
    y = y0.astype(complex)
    for k in range(sample_grid.size - 1):
        t0, t1 = sample_grid[k], sample_grid[k + 1]
        n_sub = max(1, math.ceil((t1 - t0) / h_max - 1e-12))
        h = (t1 - t0) / n_sub
        t = t0
        for _ in range(n_sub):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        states[k + 1] = y
    return states


def integrate(gamma, protocol, state0, cfg, sample_grid):
    """Integrate i*da/dt = H(t)*a and sample exactly on sample_grid.

    Parameters
    ----------
    gamma : SOCoupling or float
    protocol : object with upsilon(t)/epsilon(t)
    state0 : length-4 complex sequence, the state at cfg.t_start
    cfg : IntegratorConfig
    sample_grid : increasing times within [t_start, t_end]

    Returns
    -------
    TrajectoryRecord
    """
    y0 = as_state(state0)
    grid = np.asarray(sample_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("sample_grid must be a non-empty 1-d time sequence")
    if grid[0] < cfg.t_start - 1e-12 or grid[-1] > cfg.t_end + 1e-12:
        raise ValueError(
            f"sample_grid [{grid[0]}, {grid[-1]}] exceeds window [{cfg.t_start}, {cfg.t_end}]"
        )
    rhs = _rhs_factory(gamma, protocol)

    if cfg.method == "rk4":
        # re-step from t_start through every grid point with steps <= max_step
        full_grid = grid if grid[0] == cfg.t_start else np.concatenate([[cfg.t_start], grid])
        states = _integrate_rk4(rhs, y0, full_grid, cfg.max_step)
        if grid[0] != cfg.t_start:
            states = states[1:]
        solver_id = f"rk4(h={cfg.max_step:g})"
    else:
        sol = solve_ivp(
            rhs,
            (cfg.t_start, cfg.t_end),
            y0,
            method=_METHODS[cfg.method],
            t_eval=grid,
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            max_step=cfg.max_step,
            dense_output=False,
        )
        if not sol.success:
            last = sol.t[-1] if sol.t.size else cfg.t_start
            raise RuntimeError(f"integration failed near t={last:g}: {sol.message}")
        states = sol.y.T
        solver_id = f"{cfg.method}(rtol={cfg.rel_tol:g},atol={cfg.abs_tol:g})"

    if not np.all(np.isfinite(states)):
        raise RuntimeError("integration produced non-finite amplitudes")
    return TrajectoryRecord(grid, states, protocol, solver_id)


def compare_to_analytic(traj, analytic_eval, phase_mode="strict"):
    """Max amplitude-vector distance between a trajectory and an analytic solution.

    analytic_eval maps a scalar time to a length-4 amplitude vector.  In
    "global-phase-invariant" mode a single phase is first chosen to maximize
    the overlap at the initial sample, then the strict distance is measured.
    """
    ana = np.array([np.asarray(analytic_eval(t), dtype=complex) for t in traj.times])
    if phase_mode == "global-phase-invariant":
        overlap = np.vdot(ana[0], traj.states[0])
        if abs(overlap) > 0:
            ana = ana * (overlap / abs(overlap))
    elif phase_mode != "strict":
        raise ValueError(f"phase_mode must be 'strict' or 'global-phase-invariant', got {phase_mode!r}")
    return float(np.max(np.linalg.norm(traj.states - ana, axis=1)))
