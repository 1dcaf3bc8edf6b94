"""Gap c_inf - c for a single-site well as its depth grows (Z^1 box, V_inf = 1, f = u^3)."""

import argparse

import numpy as np

from latticenls import Problem, build_lattice_box, compare_limit_energy, power_nonlinearity, well_potential


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sides", type=int, default=16)
    ap.add_argument("--depths", type=float, nargs="+", default=list(np.linspace(0.0, 0.9, 10)))
    args = ap.parse_args()
    g = build_lattice_box(1, [args.sides], "dirichlet_box")
    nl = power_nonlinearity(1.0, 4)
    print(f"{'depth':>6} {'c':>18} {'c_inf':>18} {'gap':>12}")
    for d in args.depths:
        dips = {args.sides // 2: d} if d > 0 else {}
        cmp = compare_limit_energy(Problem(g, well_potential(g, 1.0, dips), nl), workers=2)
        print(f"{d:>6.3f} {cmp.c:>18.12f} {cmp.c_inf:>18.12f} {cmp.gap:>12.3e}")


if __name__ == "__main__":
    main()
