"""Compare the closed-form radial amplitude with the ODE-built resolvent over energy.

For each energy the ratio oracle/closed-form is sampled on a log grid in r;
the spread and offset from 1 are printed.
"""

import argparse

import numpy as np

from dkgreen.coulomb_chain import CoulombSystem
from dkgreen.green_amplitude import coulomb_kernel
from dkgreen.kg_oracle import GreenOracle, RadialProblem


def scan(alpha: float, l: int, energies: list[float], points: int) -> None:
    grid = np.geomspace(0.05, 50.0, points)
    print(f"{'epsilon':>8} {'max |ratio-1|':>14} {'spread':>10}")
    for eps in energies:
        c = CoulombSystem(eps, alpha, l, 3)
        oracle = GreenOracle(RadialProblem(c), grid[0], grid[-1])
        ratios = np.array([oracle(a, b) / coulomb_kernel(c, a, b) for a in grid for b in grid])
        print(f"{eps:>8.4f} {np.max(np.abs(ratios - 1)):>14.2e} {np.ptp(ratios):>10.2e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=1 / 137.036)
    ap.add_argument("--l", type=int, default=0)
    ap.add_argument("--points", type=int, default=8)
    ap.add_argument("--energies", type=float, nargs="+", default=[-0.9, -0.5, 0.0, 0.3, 0.6, 0.9, 0.99])
    a = ap.parse_args()
    scan(a.alpha, a.l, a.energies, a.points)
