"""Hellinger error of least-squares surrogates for the 2-D Rosenbrock density.

    python scripts/rosenbrock_convergence.py --levels 5 10 15 20 25 --out rosenbrock.csv
"""
import argparse

from polytransport.metrics import convergence_study
from polytransport.targets import RosenbrockTarget


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=float, nargs="+", default=[5, 10, 15, 20, 25])
    ap.add_argument("--method", choices=("wls", "interp"), default="wls")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="rosenbrock_convergence.csv")
    args = ap.parse_args()

    rec = convergence_study(
        RosenbrockTarget().oracle(), "rosenbrock", (1, 1), args.levels, method=args.method, seed=args.seed,
        log=lambda r: print(f"level {r.level:g}: |Lambda|={r.cardinality} n={r.evaluations} "
                            f"hellinger={r.hellinger:.4g} ({r.seconds:.1f}s)"),
    )
    rec.write_csv(args.out)
    h = rec.column("hellinger")
    print(f"last/first = {h[-1] / h[0]:.3f} -> {args.out}")


if __name__ == "__main__":
    main()
