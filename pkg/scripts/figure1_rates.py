"""Asymptotic rate bounds against sparsity beta (K = N^(1 - beta)).

    python3 scripts/figure1_rates.py --out results/rates.csv
"""

import argparse
import csv
import sys

import numpy as np

from grouptest.analytics import BETA_STAR, rate_bounds

FIELDS = ("capacity_upper", "comp_lower", "dd_lower", "sss_upper", "k_beta")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=100)
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    betas = np.linspace(1.0 / args.points, 1.0, args.points)
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("beta",) + FIELDS)
    for b in betas:
        r = rate_bounds(float(b))
        w.writerow([f"{b:.6g}"] + [f"{getattr(r, f):.6g}" for f in FIELDS])
    if fh is not sys.stdout:
        fh.close()
    print(f"SSS bound reaches capacity at beta* = {BETA_STAR:.5f}", file=sys.stderr)


if __name__ == "__main__":
    main()
