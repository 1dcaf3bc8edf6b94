"""Print c_L on growing Dirichlet boxes of Z^N and the successive differences.

    python3 scripts/truncation_table.py --dimension 2 --sizes 5 9 13 17
"""

import argparse

from latticenls import power_nonlinearity, truncation_study


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dimension", type=int, default=1)
    ap.add_argument("--sizes", type=int, nargs="+", default=[3, 5, 7, 9, 11])
    ap.add_argument("--vinf", type=float, default=1.0)
    ap.add_argument("--q", type=float, default=4.0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    rows = truncation_study(args.dimension, args.sizes, args.vinf, power_nonlinearity(1.0, args.q), workers=args.workers)
    print(f"{'L':>4} {'|V|':>7} {'c_L':>20} {'c_L - c_prev':>14} {'iters':>6}")
    for r in rows:
        diff = "" if r.difference is None else f"{r.difference:.3e}"
        print(f"{r.size:>4} {r.vertex_count:>7} {r.energy:>20.14f} {diff:>14} {r.iterations:>6}")


if __name__ == "__main__":
    main()
