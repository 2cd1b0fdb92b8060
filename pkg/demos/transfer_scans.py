"""Asymptotic transfer maps: splitting, pulse area and coupling angle sweeps.

Three one-parameter scans of the synchronous drive, all starting from the
left-up level at the pulse peak (epoch 0):

  * Zeeman splitting beta at fixed half-pi pulse area: transfer is killed
    like 1/(1+beta^2), the detuning-dominated suppression.
  * Pulse area V/Omega at integer coupling angle: Z31 oscillates as
    cos(2V/Omega) between complete return (+1) and complete transfer (-1).
  * Coupling angle gamma at half-pi area: the left well always empties, and
    the spin of what arrives is set by gamma alone (Z31 + Z32 = -1).

Run:  python3 demos/transfer_scans.py
"""

import math

import numpy as np

from sodw import ScanSpec, run_scan

START = (0, 0, 1, 0)


def splitting_scan():
    spec = ScanSpec(
        "beta",
        np.linspace(0.0, 4.0, 17),
        {"gamma": 0.5, "V": math.pi / 2, "Omega": 1.0},
        START,
        epoch=0.0,
    )
    res = run_scan(spec)
    print("beta scan (gamma = 1/2, V/Omega = pi/2):")
    print("  beta    Z31      Z32      1/(1+beta^2)")
    for row in res.rows[::4]:
        bound = 1.0 / (1.0 + row.param**2)
        print(f"  {row.param:4.1f}  {row.values[0]:+.4f}  {row.values[1]:+.4f}   {bound:.4f}")


def area_scan():
    spec = ScanSpec(
        "V_over_Omega",
        np.linspace(0.0, 2.0 * math.pi, 25),
        {"gamma": 1.0, "beta": 0.0, "Omega": 1.0},
        START,
        epoch=0.0,
        observables=((3, 1),),
    )
    res = run_scan(spec)
    print("\npulse area scan (gamma = 1, beta = 0):")
    for row in res.rows[::4]:
        marks = ""
        if abs(row.values[0] - 1.0) < 1e-9:
            marks = "  <- complete return"
        if abs(row.values[0] + 1.0) < 1e-9:
            marks = "  <- complete transfer"
        print(f"  V/Omega = {row.param:6.4f}   Z31 = {row.values[0]:+.6f}{marks}")


def angle_scan():
    spec = ScanSpec(
        "gamma",
        np.linspace(0.0, 2.0, 21),
        {"beta": 0.0, "V": math.pi / 2, "Omega": 1.0},
        START,
        epoch=0.0,
    )
    res = run_scan(spec)
    print("\ncoupling angle scan (beta = 0, V/Omega = pi/2):")
    print("  gamma   Z31      Z32      Z31+Z32")
    for row in res.rows[::5]:
        total = row.values[0] + row.values[1]
        print(f"  {row.param:5.2f}  {row.values[0]:+.4f}  {row.values[1]:+.4f}  {total:+.4f}")
    worst = max(abs(r.values[0] + r.values[1] + 1.0) for r in res.rows)
    print(f"  max |Z31 + Z32 + 1| over the grid: {worst:.2e}")


if __name__ == "__main__":
    splitting_scan()
    area_scan()
    angle_scan()
