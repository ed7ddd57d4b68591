"""Sparse (K=4) and dense (K=25) instances at N=500 with p = 1/K.

For each regime prints beta_eff and writes analytic curves plus a Monte Carlo
sweep to ``<prefix>_<regime>.csv``.

    python3 scripts/figure4_regimes.py --trials 200 --prefix results/figure4
"""

import argparse
import csv
import os

from grouptest.analytics import beta_eff
from grouptest.simulator import SweepConfig, run_sweep

from figure3_bounds import curves

REGIMES = {"sparse": (4, range(10, 101, 5)), "dense": (25, range(100, 401, 20))}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--algorithms", default="COMP,DD,SCOMP,SSS")
    ap.add_argument("--prefix", default="figure4")
    args = ap.parse_args(argv)

    n = 500
    for name, (k, grid) in REGIMES.items():
        print(f"{name}: K={k}, beta_eff={beta_eff(n, k):.4f}")
        cfg = SweepConfig(n_items=n, n_defectives=k, inclusion_prob=1 / k, t_values=tuple(grid),
                          trials=args.trials, seed=args.seed,
                          algorithms=tuple(args.algorithms.split(",")))
        result = run_sweep(cfg, workers=args.workers)
        path = f"{args.prefix}_{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            header = None
            for t in grid:
                row = curves(n, k, 1 / k, t)
                if header is None:
                    header = ["T"] + list(row) + list(cfg.algorithms)
                    w.writerow(header)
                w.writerow([t] + [f"{v:.6g}" for v in row.values()]
                           + [f"{result.rate(t, a):.6g}" for a in cfg.algorithms])
        print(f"  wrote {path}")


if __name__ == "__main__":
    main()
