"""Empirical success rates of COMP, DD, SCOMP and SSS at N=500, K=10, p=0.1.

Writes the sweep CSV and prints the DD rate next to the exact formula.

    python3 scripts/figure2_sweep.py --trials 1000 --out results/figure2.csv
"""

import argparse
import csv
import math
import os
import time

from grouptest.analytics import InstanceParams, dd_success_exact
from grouptest.cli import main as cli_main


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="figure2.csv")
    args = ap.parse_args(argv)

    start = time.perf_counter()
    rc = cli_main(["simulate", "--N", "500", "--K", "10", "--p", "0.1", "--Tmin", "50",
                   "--Tmax", "250", "--Tstep", "10", "--trials", str(args.trials),
                   "--seed", str(args.seed), "--workers", str(args.workers), "--out", args.out])
    if rc:
        raise SystemExit(rc)
    print(f"sweep finished in {time.perf_counter() - start:.0f}s -> {args.out}")

    rates = {}
    with open(args.out) as fh:
        for row in csv.DictReader(fh):
            rates[(int(row["T"]), row["algorithm"])] = float(row["success_rate"])
    print(f"{'T':>4} {'COMP':>7} {'DD':>7} {'SCOMP':>7} {'SSS':>7} {'DD exact':>9} {'z':>6}")
    for t in sorted({t for t, _ in rates}):
        exact = dd_success_exact(InstanceParams(500, 10, 0.1, t))
        sigma = math.sqrt(exact * (1 - exact) / args.trials) or float("inf")
        z = (rates[(t, "DD")] - exact) / sigma
        print(f"{t:>4} " + " ".join(f"{rates[(t, a)]:7.3f}" for a in ("COMP", "DD", "SCOMP", "SSS"))
              + f" {exact:9.4f} {z:6.2f}")


if __name__ == "__main__":
    main()
