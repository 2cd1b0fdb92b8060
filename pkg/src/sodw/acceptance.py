"""Release gate: thirteen behavioral checks with hard tolerances.

Each criterion function returns (passed, details).  run_all executes all of
them (or a subset by id), timing each; the cli verify verb prints one line
per criterion and exits nonzero when any check fails.  Tolerances are stated
inline in the details so a failing line is self-explanatory.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import asynchronous as asyn
from . import sync
from .analysis import count_peaks, exact_trajectory
from .core import AsyncTanhSech, SyncSech2, as_state, hamiltonian_matrix
from .oracle import IntegratorConfig, integrate

__all__ = ["CRITERIA", "run_all", "format_record"]

_THIRD_IC = (0.0, 0.0, 1.0, 0.0)
_RAMP_IC = (math.sqrt(0.1), math.sqrt(0.2), math.sqrt(0.3), math.sqrt(0.4))
_LR_MIX_ICS = (
    (0.0, 0.0, math.sqrt(3 / 8), math.sqrt(5 / 8)),
    (math.sqrt(1 / 8), math.sqrt(1 / 8), 0.5, math.sqrt(0.5)),
    (0.5, 0.5, math.sqrt(1 / 8), math.sqrt(3 / 8)),
    (0.5, math.sqrt(0.5), math.sqrt(1 / 8), math.sqrt(1 / 8)),
    (math.sqrt(3 / 8), math.sqrt(5 / 8), 0.0, 0.0),
)
_PAIR13_ICS = (
    (0.0, 0.0, 1.0, 0.0),
    (0.5, 0.0, math.sqrt(3.0) / 2, 0.0),
    (1 / math.sqrt(2.0), 0.0, 1 / math.sqrt(2.0), 0.0),
    (math.sqrt(3.0) / 2, 0.0, 0.5, 0.0),
    (1.0, 0.0, 0.0, 0.0),
)
_PAIR14_ICS = (
    (0.0, 0.0, 0.0, 1.0),
    (0.5, 0.0, 0.0, math.sqrt(3.0) / 2),
    (1 / math.sqrt(2.0), 0.0, 0.0, 1 / math.sqrt(2.0)),
    (math.sqrt(3.0) / 2, 0.0, 0.0, 0.5),
    (1.0, 0.0, 0.0, 0.0),
)


def _sync_endpoint_z(protocol, gamma, targets):
    """Asymptotic (Z31, Z32) for a pulse-center start in the third level."""
    z31 = sync.asymptotic_imbalance_sync(protocol, gamma, _THIRD_IC, 0.0, 3, 1)
    z32 = sync.asymptotic_imbalance_sync(protocol, gamma, _THIRD_IC, 0.0, 3, 2)
    t31, t32 = targets
    ok = abs(z31 - t31) < 2e-3 and abs(z32 - t32) < 2e-3
    return ok, z31, z32


def _criterion_01():
    protocol = SyncSech2(0.5, math.pi / 2, 1.0)
    ok, z31, z32 = _sync_endpoint_z(protocol, 0.5, (0.2272, -0.5456))
    grid = np.linspace(0.0, 25.0, 251)
    cfg = IntegratorConfig(t_start=0.0, t_end=25.0, rel_tol=1e-12, abs_tol=1e-14)
    p = np.abs(integrate(0.5, protocol, _THIRD_IC, cfg, grid).states[-1]) ** 2
    gap = max(abs(z31 - (p[2] - p[0])), abs(z32 - (p[2] - p[1])))
    ok = ok and gap < 1e-9
    return ok, (
        f"Z31={z31:.6f} (want 0.2272), Z32={z32:.6f} (want -0.5456) within 2e-3; "
        f"exact-vs-oracle gap {gap:.2e} (<1e-9)"
    )


def _criterion_02():
    ok, z31, z32 = _sync_endpoint_z(SyncSech2(0.0, 2.0, 1.0), 1.0, (-0.6536, 0.1732))
    return ok, f"Z31={z31:.6f} (want -0.6536), Z32={z32:.6f} (want 0.1732) within 2e-3"


def _criterion_03():
    ok, z31, z32 = _sync_endpoint_z(SyncSech2(0.0, math.pi / 2, 1.0), 0.35, (-0.2061, -0.7939))
    sum_gap = abs(z31 + z32 + 1.0)
    ok = ok and sum_gap < 1e-9
    return ok, (
        f"Z31={z31:.6f} (want -0.2061), Z32={z32:.6f} (want -0.7939) within 2e-3; "
        f"|Z31+Z32+1| = {sum_gap:.2e} (<1e-9)"
    )


def _criterion_04():
    worst_exact = worst_num = 0.0
    for n in range(3):
        protocol = SyncSech2(0.0, (n + 0.5) * math.pi, 1.0)
        z = sync.asymptotic_imbalance_sync(protocol, 1.0, _THIRD_IC, 0.0, 3, 1)
        worst_exact = max(worst_exact, abs(z + 1.0))
        grid = np.linspace(0.0, 25.0, 101)
        cfg = IntegratorConfig(t_start=0.0, t_end=25.0)
        p = np.abs(integrate(1.0, protocol, _THIRD_IC, cfg, grid).states[-1]) ** 2
        worst_num = max(worst_num, abs((p[2] - p[0]) + 1.0))
    ok = worst_exact < 1e-9 and worst_num < 1e-6
    return ok, (
        f"complete-transfer residual over half-integer pulse areas: "
        f"exact {worst_exact:.2e} (<1e-9), oracle {worst_num:.2e} (<1e-6)"
    )


def _criterion_05():
    protocol = SyncSech2(0.0, math.pi / 2, 1.0)
    T = 25.0
    ends = np.array([-T, T])
    pe = np.abs(exact_trajectory(protocol, 0.15, _RAMP_IC, -T, ends)) ** 2
    gap_exact = float(np.max(np.abs(pe[1] - pe[0])))
    cfg = IntegratorConfig(t_start=-T, t_end=T)
    pn = np.abs(integrate(0.15, protocol, _RAMP_IC, cfg, ends).states) ** 2
    gap_num = float(np.max(np.abs(pn[1] - pn[0])))
    ok = gap_exact < 1e-6 and gap_num < 1e-6
    return ok, f"max |P(+T)-P(-T)|: exact {gap_exact:.2e}, oracle {gap_num:.2e} (<1e-6)"


def _criterion_06():
    protocol = SyncSech2(0.0, math.pi / 4, 1.0)
    T = 25.0
    worst = 0.0
    for ic in _LR_MIX_ICS:
        p = np.abs(exact_trajectory(protocol, 0.15, ic, -T, np.array([-T, T]))) ** 2
        zlr = (p[:, 2] + p[:, 3]) - (p[:, 0] + p[:, 1])
        worst = max(worst, abs(zlr[1] + zlr[0]))
    return worst < 1e-6, f"max |Z_LR(+T)+Z_LR(-T)| = {worst:.2e} over five starts (<1e-6)"


def _criterion_07():
    protocol = SyncSech2(0.0, math.pi / 4, 1.0)
    tau_inf = protocol.V / protocol.Omega
    eig = sync.eigen_sync(0.0, 0.25)
    coeffs = sync.superposition_from_initial(eig, as_state(_THIRD_IC), -tau_inf)
    p = np.abs(sync.evolve_sync(eig, coeffs, tau_inf)) ** 2
    gap = max(abs(p[0] - 0.5), abs(p[1] - 0.5))
    return gap < 1e-6, f"P1={p[0]:.8f}, P2={p[1]:.8f} (want 0.5 each; off by {gap:.2e}, <1e-6)"


def _criterion_08():
    params = AsyncTanhSech(1.0, 1.0, 1.0)
    T = 25.0
    targets = (1.0, 0.5, 0.0, -0.5, -1.0)
    worst_sym = worst_anchor = 0.0
    for ic, target in zip(_PAIR13_ICS, targets):
        p = np.abs(asyn.async_trajectory(params, 2.0, ic, -T, np.array([-T, T]))) ** 2
        z = p[:, 2] - p[:, 0]
        worst_sym = max(worst_sym, abs(z[1] - z[0]))
        worst_anchor = max(worst_anchor, abs(z[0] - target))
    ok = worst_sym < 1e-6 and worst_anchor < 1e-12
    return ok, (
        f"max |Z31(+T)-Z31(-T)| = {worst_sym:.2e} (<1e-6); "
        f"start-value offset {worst_anchor:.2e} (<1e-12)"
    )


def _criterion_09():
    params = AsyncTanhSech(1.0, 1.0, 2.0)
    T = 12.5
    worst = 0.0
    for ic in _PAIR13_ICS:
        p = np.abs(asyn.async_trajectory(params, 2.0, ic, -T, np.array([-T, T]))) ** 2
        z = p[:, 2] - p[:, 0]
        worst = max(worst, abs(z[1] + z[0]))
    times = np.linspace(-T, T, 2001)
    p = np.abs(asyn.async_trajectory(params, 2.0, _PAIR13_ICS[2], -T, times)) ** 2
    cdt = float(np.max(np.abs(p[:, 2] - p[:, 0])))
    ok = worst < 1e-6 and cdt < 1e-9
    return ok, (
        f"max |Z31(+T)+Z31(-T)| = {worst:.2e} (<1e-6); "
        f"equal-pair start keeps max |Z31| = {cdt:.2e} (<1e-9)"
    )


def _criterion_10():
    params = AsyncTanhSech(math.sqrt(0.21), 0.5, 0.4)
    T = 62.5
    sign = asyn.flip_branch_sign(0.5)
    worst_sym = worst_asym = 0.0
    for ic in _PAIR14_ICS:
        state0 = as_state(ic)
        p = np.abs(asyn.async_trajectory(params, 0.5, state0, -T, np.array([-T, T]))) ** 2
        z41 = p[:, 3] - p[:, 0]
        worst_sym = max(worst_sym, abs(z41[1] + z41[0]))
        consts = asyn.flip_constants(state0[[0, 3]], "C", params, -T, sign)
        asym = asyn.flip_asymptotic_populations(consts)
        worst_asym = max(
            worst_asym, abs(p[1, 3] - asym.second_plus), abs(p[1, 0] - asym.first_plus)
        )
    ok = worst_sym < 1e-6 and worst_asym < 1e-6
    return ok, (
        f"max |Z41(+T)+Z41(-T)| = {worst_sym:.2e}; "
        f"constant-based asymptotes off by {worst_asym:.2e} (<1e-6)"
    )


def _random_state(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return v / np.linalg.norm(v)


def _max_distance(gamma, protocol, state0, t_lo, t_hi, samples=121):
    grid = np.linspace(t_lo, t_hi, samples)
    ana = exact_trajectory(protocol, gamma, state0, t_lo, grid)
    cfg = IntegratorConfig(t_start=t_lo, t_end=t_hi)
    num = integrate(gamma, protocol, state0, cfg, grid).states
    return float(np.max(np.linalg.norm(ana - num, axis=1)))


def _criterion_11(cases=50):
    rng = np.random.default_rng(20260815)
    worst = {"sync": 0.0, "conserving": 0.0, "flip": 0.0}
    for _ in range(cases):
        protocol = SyncSech2(rng.uniform(0, 2), rng.uniform(0.3, 2), rng.uniform(0.5, 2))
        T = 10.0 / protocol.Omega
        d = _max_distance(rng.uniform(0, 2), protocol, _random_state(rng), -T, T)
        worst["sync"] = max(worst["sync"], d)
    for _ in range(cases):
        gamma = float(rng.choice([0.0, 1.0, 2.0, 3.0]))
        protocol = AsyncTanhSech(rng.uniform(0, 2), rng.uniform(0.05, 2), rng.uniform(0.4, 2))
        T = 25.0 / protocol.chi
        d = _max_distance(gamma, protocol, _random_state(rng), -T, T)
        worst["conserving"] = max(worst["conserving"], d)
    for _ in range(cases):
        gamma = float(rng.choice([0.5, 1.5]))
        chi = rng.uniform(0.4, 2.0)
        eps = rng.uniform(0.0, 2.0)
        protocol = AsyncTanhSech(eps, math.hypot(0.5 * chi, eps), chi)
        d = _max_distance(gamma, protocol, _random_state(rng), -25.0 / chi, 25.0 / chi)
        worst["flip"] = max(worst["flip"], d)
    ok = all(v < 1e-6 for v in worst.values())
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    return ok, f"max |exact-oracle| over {cases} random cases per branch: {detail} (<1e-6)"


def _criterion_12():
    worst_res = 0.0
    pairing_ok = symmetric_ok = True
    for beta in (0.0, 0.3, 1.0, 2.5):
        for gamma in (0.0, 0.15, 0.5, 1.0, 1.3, 2.0):
            eig = sync.eigen_sync(beta, gamma)
            h = hamiltonian_matrix(gamma, 1.0, beta)
            symmetric_ok &= bool(np.array_equal(h, h.T))
            res = np.abs(h @ eig.vec.T - eig.vec.T * eig.lam)
            worst_res = max(worst_res, float(res.max()))
            pairing_ok &= eig.lam[0] + eig.lam[1] == 0.0 and eig.lam[2] + eig.lam[3] == 0.0
    times = np.linspace(-25.0, 25.0, 2001)
    drifts = []
    states = exact_trajectory(SyncSech2(0.5, math.pi / 2, 1.0), 0.5, _THIRD_IC, -25.0, times)
    drifts.append(np.max(np.abs(np.sum(np.abs(states) ** 2, axis=1) - 1.0)))
    states = asyn.async_trajectory(AsyncTanhSech(1.0, 1.0, 1.0), 2.0, _PAIR13_ICS[1], -25.0, times)
    drifts.append(np.max(np.abs(np.sum(np.abs(states) ** 2, axis=1) - 1.0)))
    flip_times = np.linspace(-62.5, 62.5, 2001)
    states = asyn.async_trajectory(
        AsyncTanhSech(math.sqrt(0.21), 0.5, 0.4), 0.5, _PAIR14_ICS[1], -62.5, flip_times
    )
    drifts.append(np.max(np.abs(np.sum(np.abs(states) ** 2, axis=1) - 1.0)))
    ana_drift = float(max(drifts))
    grid = np.linspace(0.0, 25.0, 501)
    cfg = IntegratorConfig(t_start=0.0, t_end=25.0)
    num_drift = integrate(0.5, SyncSech2(0.5, math.pi / 2, 1.0), _THIRD_IC, cfg, grid).norm_drift_max
    ok = (
        worst_res < 1e-12
        and pairing_ok
        and symmetric_ok
        and ana_drift < 1e-9
        and num_drift < 1e-8
    )
    return ok, (
        f"eigen residual {worst_res:.2e} (<1e-12); "
        f"opposite-sign level pairing {'exact' if pairing_ok else 'BROKEN'}; "
        f"matrix symmetry {'exact' if symmetric_ok else 'BROKEN'}; "
        f"analytic norm drift {ana_drift:.2e} (<1e-9); numeric drift {num_drift:.2e} (<1e-8)"
    )


def _criterion_13():
    window = (-5.0, 5.0)
    times = np.linspace(-25.0, 25.0, 2001)
    p = np.abs(exact_trajectory(SyncSech2(0.0, math.pi / 2, 1.0), 0.15, _RAMP_IC, -25.0, times)) ** 2
    n_return = count_peaks(times, p[:, 0], window, 0.01)
    states = asyn.async_trajectory(AsyncTanhSech(1.0, 1.0, 1.0), 2.0, _THIRD_IC, -25.0, times)
    z = np.abs(states[:, 2]) ** 2 - np.abs(states[:, 0]) ** 2
    n_cons = count_peaks(times, z, window, 0.01) + count_peaks(times, -z, window, 0.01)
    tb = np.linspace(-12.5, 12.5, 2001)
    states = asyn.async_trajectory(AsyncTanhSech(1.0, 1.0, 2.0), 2.0, _THIRD_IC, -12.5, tb)
    zb = np.abs(states[:, 2]) ** 2 - np.abs(states[:, 0]) ** 2
    n_inv = count_peaks(tb, zb, window, 0.01) + count_peaks(tb, -zb, window, 0.01)
    ok = n_return == 1 and n_cons == 1 and n_inv == 0
    return ok, (
        f"prominent-extremum counts: returning-pulse P1 {n_return} (want 1), "
        f"conserving-pulse Z31 {n_cons} (want 1), inverting-pulse Z31 {n_inv} (want 0)"
    )


CRITERIA = (
    (1, "sync imbalance targets, detuned pulse", _criterion_01),
    (2, "sync imbalance targets, integer coupling angle", _criterion_02),
    (3, "sync imbalance sum rule", _criterion_03),
    (4, "complete transfer at half-integer pulse areas", _criterion_04),
    (5, "population-conserving sync pulse", _criterion_05),
    (6, "population-inverting sync pulse", _criterion_06),
    (7, "equal split at quarter coupling angle", _criterion_07),
    (8, "conserving async pulse restores imbalance", _criterion_08),
    (9, "inverting async pulse flips imbalance, CDT null", _criterion_09),
    (10, "spin-flip pulse inversion and asymptotes", _criterion_10),
    (11, "oracle equivalence sweep", _criterion_11),
    (12, "structural invariants", _criterion_12),
    (13, "prominent-extremum counts", _criterion_13),
)


def run_all(ids=None):
    """Run the acceptance checks, returning one record dict per criterion."""
    records = []
    for cid, name, fn in CRITERIA:
        if ids is not None and cid not in ids:
            continue
        start = time.perf_counter()
        try:
            passed, details = fn()
        except Exception as exc:
            passed, details = False, f"raised {type(exc).__name__}: {exc}"
        records.append(
            {
                "id": cid,
                "name": name,
                "passed": bool(passed),
                "details": details,
                "elapsed": time.perf_counter() - start,
            }
        )
    return records


def format_record(record):
    status = "PASS" if record["passed"] else "FAIL"
    return (
        f"criterion {record['id']:02d} {status} {record['name']}: "
        f"{record['details']} [{record['elapsed']:.2f}s]"
    )
