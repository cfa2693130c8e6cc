"""Fit a Rosenbrock surrogate, draw samples and compare sample moments with quadrature."""
import argparse

import numpy as np

from polytransport.metrics import QuadratureGrid
from polytransport.multiindex import construct_anisotropic
from polytransport.targets import RosenbrockTarget
from polytransport.transport import TriangularTransport, pushforward_sample
from polytransport.wls import fit


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--level", type=float, default=20)
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    target = RosenbrockTarget()
    rng = np.random.default_rng(args.seed)
    g, run = fit(target.oracle(), construct_anisotropic((1, 1), args.level), rng)
    x = pushforward_sample(TriangularTransport(g), args.n, rng)

    q = QuadratureGrid.tensor(2, 128)
    f = target(q.points)
    mean = (q.weights * f) @ q.points / (q.weights @ f)
    print(f"|Lambda|={len(g.index_set)} n={run.n} rounds={run.rounds}")
    print("sample mean", x.mean(axis=0), "target mean", mean)


if __name__ == "__main__":
    main()
