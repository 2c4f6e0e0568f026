"""Relative deviation of the binding energy from alpha^2 / 2N^2 as alpha shrinks.

The deviation should fall like alpha^2; the fitted log-log slope is printed
per level.
"""

import numpy as np

from dkgreen.coulomb_chain import CoulombSystem
from dkgreen.green_amplitude import closed_form_level

ALPHAS = np.geomspace(1 / 137.035999, 1e-4, 6)


def deviation(alpha: float, n_r: int, l: int) -> float:
    e = closed_form_level(CoulombSystem(0.0, alpha, l, 3), n_r)
    n = n_r + l + 1
    return e.binding / (alpha**2 / (2 * n * n)) - 1


def main() -> None:
    print(f"{'n_r':>3} {'l':>2} {'dev at alpha_fs':>16} {'slope':>8}")
    for l in range(3):
        for n_r in range(3):
            devs = [abs(deviation(a, n_r, l)) for a in ALPHAS]
            slope = np.polyfit(np.log(ALPHAS), np.log(devs), 1)[0]
            print(f"{n_r:>3} {l:>2} {devs[0]:>16.3e} {slope:>8.4f}")


if __name__ == "__main__":
    main()
