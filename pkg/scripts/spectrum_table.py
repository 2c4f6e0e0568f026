"""Print closed-form and bisected bound levels side by side.

    python3 scripts/spectrum_table.py --alpha 0.0072973525693 --lmax 3 --nmax 5
"""

import argparse

from dkgreen.coulomb_chain import CoulombSystem
from dkgreen.green_amplitude import bound_spectrum, solve_level


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--alpha", type=float, default=7.2973525693e-3)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--lmax", type=int, default=3)
    ap.add_argument("--nmax", type=int, default=5)
    args = ap.parse_args()

    print(f"{'l':>2} {'n_r':>3} {'epsilon_n':>22} {'bisected - closed':>18} {'binding':>12}")
    for l in range(args.lmax + 1):
        base = CoulombSystem(0.0, args.alpha, l, args.dim)
        for e in bound_spectrum(base, args.nmax):
            diff = solve_level(base, e.n_r) - e.energy_ratio
            print(f"{l:>2} {e.n_r:>3} {e.energy_ratio:>22.17f} {diff:>18.2e} {e.binding:>12.5e}")


if __name__ == "__main__":
    main()
