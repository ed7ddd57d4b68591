"""Analytic success curves at N=500, K=10, p=0.1, optionally joined with a sweep CSV.

    python3 scripts/figure3_bounds.py --sweep figure2.csv --out figure3.csv
"""

import argparse
import csv
import sys

from grouptest.analytics import (InstanceParams, comp_success_lower, dd_success_exact,
                                 dd_success_lower, info_bound, sss_success_lower,
                                 sss_success_upper)


def curves(n, k, p, t):
    params = InstanceParams(n, k, p, t)
    return {
        "info_bound": info_bound(n, k, t),
        "comp_lower": comp_success_lower(params),
        "dd_exact": dd_success_exact(params),
        "dd_lower": dd_success_lower(params),
        "sss_lower": sss_success_lower(params),
        "sss_upper": min(sss_success_upper(k, t), info_bound(n, k, t)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=500)
    ap.add_argument("--K", type=int, default=10)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--Tmax", type=int, default=250)
    ap.add_argument("--Tstep", type=int, default=5)
    ap.add_argument("--sweep", help="simulate CSV to join on T")
    ap.add_argument("--out", default="-")
    args = ap.parse_args(argv)

    empirical = {}
    if args.sweep:
        with open(args.sweep) as fh:
            for row in csv.DictReader(fh):
                empirical.setdefault(int(row["T"]), {})[row["algorithm"]] = row["success_rate"]
    algs = sorted({a for v in empirical.values() for a in v})

    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh, lineterminator="\n")
    header = None
    for t in range(0, args.Tmax + 1, args.Tstep):
        row = curves(args.N, args.K, args.p, t)
        if header is None:
            header = ["T"] + list(row) + [f"empirical_{a}" for a in algs]
            w.writerow(header)
        w.writerow([t] + [f"{v:.6g}" for v in row.values()]
                   + [empirical.get(t, {}).get(a, "") for a in algs])
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
