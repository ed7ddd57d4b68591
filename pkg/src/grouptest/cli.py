"""Command-line front end: ``grouptest {simulate,bounds,rates,decode,check-design}``.

Exit codes: 0 success, 1 usage error, 2 runtime error (including SSS budget
exhaustion).
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from contextlib import contextmanager

from . import analytics
from .core import DEFAULT_SUBSET_CAP, DesignTooLargeError, InstanceFormatError, is_k_disjunct, \
    is_k_separable, is_satisfying, read_instance
from .decoders import ALGORITHMS, DEFAULT_NODE_LIMIT, DecodeError, SssOptions, decode
from .simulator import SweepAborted, SweepConfig, run_sweep

EXIT_USAGE, EXIT_RUNTIME = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    """Six significant digits, locale independent."""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.6g}"


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _t_grid(args) -> list[int]:
    if args.Tmin < 0 or args.Tstep < 1 or args.Tmax < args.Tmin:
        raise UsageError("need 0 <= Tmin <= Tmax and Tstep >= 1")
    return list(range(args.Tmin, args.Tmax + 1, args.Tstep))


def _inclusion_prob(args) -> float:
    if args.p is not None:
        return args.p
    return 1.0 / max(args.K, 1)


def _sss_options(args) -> SssOptions:
    if args.node_limit < 1:
        raise UsageError("--node-limit must be at least 1")
    return SssOptions(use_dd_preprocessing=not args.no_dd_preprocessing,
                      known_k=getattr(args, "known_k", None), node_limit=args.node_limit)


def cmd_simulate(args) -> int:
    algorithms = [a.strip().upper() for a in args.algorithms.split(",") if a.strip()]
    try:
        config = SweepConfig(
            n_items=args.N, n_defectives=args.K, inclusion_prob=_inclusion_prob(args),
            t_values=_t_grid(args), trials=args.trials, seed=args.seed,
            algorithms=algorithms, sss_options=_sss_options(args),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    result = run_sweep(config, workers=args.workers)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["T", "algorithm", "trials", "successes", "success_rate", "stderr",
                    "budget_exhausted"])
        for r in result.rows:
            w.writerow([r.t, r.algorithm, r.trials, r.successes, fmt(r.success_rate),
                        fmt(r.stderr), r.budget_exhausted])
    return 0


def cmd_bounds(args) -> int:
    p = _inclusion_prob(args)
    if not 0 < p < 1 or not 0 <= args.K <= args.N:
        raise UsageError("need 0 < p < 1 and 0 <= K <= N")
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["T", "info_bound", "comp_lower", "dd_exact", "dd_lower", "sss_lower",
                    "sss_upper"])
        for t in _t_grid(args):
            params = analytics.InstanceParams(args.N, args.K, p, t)
            w.writerow([
                t,
                fmt(analytics.info_bound(args.N, args.K, t)),
                fmt(analytics.comp_success_lower(params)),
                fmt(analytics.dd_success_exact(params)),
                fmt(analytics.dd_success_lower(params)),
                fmt(analytics.sss_success_lower(params)),
                fmt(analytics.sss_success_upper(args.K, t)),
            ])
    return 0


def cmd_rates(args) -> int:
    lo, hi, step = args.beta_min, args.beta_max, args.step
    if not (0 < lo <= hi <= 1) or step <= 0:
        raise UsageError("need 0 < beta_min <= beta_max <= 1 and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    betas = [round(lo + i * step, 12) for i in range(count)]
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["beta", "capacity", "comp_lower", "dd_lower", "sss_upper", "k_beta"])
        for b in betas:
            r = analytics.rate_bounds(b)
            w.writerow([fmt(b), fmt(r.capacity_upper), fmt(r.comp_lower), fmt(r.dd_lower),
                        fmt(r.sss_upper), fmt(r.k_beta)])
        fh.write(f"# beta_star={fmt(analytics.BETA_STAR)}\n")
    return 0


def _items(s) -> str:
    return " ".join(str(i) for i in sorted(s))


def cmd_decode(args) -> int:
    instance = read_instance(args.instance)
    y = instance.resolved_outcomes()
    out = decode(args.algorithm, instance.matrix, y, _sss_options(args))
    print(f"algorithm: {args.algorithm.upper()}")
    print(f"estimate: {_items(out.estimate)}")
    print(f"pd: {_items(out.pd_set)}")
    print(f"dd: {_items(out.dd_set)}")
    satisfying = is_satisfying(instance.matrix, y, out.estimate)
    print(f"satisfying: {'yes' if satisfying else 'no'}")
    if instance.defectives is not None:
        print(f"success: {'yes' if out.estimate == instance.defectives else 'no'}")
    for key in sorted(out.stats):
        print(f"{key}: {out.stats[key]}")
    return 0


def cmd_check_design(args) -> int:
    instance = read_instance(args.instance)
    X = instance.matrix
    disjunct = is_k_disjunct(X, args.k, cap=args.cap)
    separable = is_k_separable(X, args.k, cap=args.cap)
    print(f"k: {args.k}")
    print(f"disjunct: {'yes' if disjunct else 'no'}")
    print(f"separable: {'yes' if separable else 'no'}")
    return 0


def _add_grid(p, tmin, tmax, tstep):
    p.add_argument("--N", type=int, default=500)
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--p", type=float, default=None, help="inclusion probability (default 1/K)")
    p.add_argument("--Tmin", type=int, default=tmin)
    p.add_argument("--Tmax", type=int, default=tmax)
    p.add_argument("--Tstep", type=int, default=tstep)
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")


def _add_sss(p):
    p.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)
    p.add_argument("--no-dd-preprocessing", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grouptest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="Monte Carlo success rates over a T grid")
    _add_grid(sim, 50, 250, 10)
    sim.add_argument("--trials", type=int, default=1000)
    sim.add_argument("--seed", type=int, default=1)
    sim.add_argument("--algorithms", default=",".join(ALGORITHMS))
    sim.add_argument("--workers", type=int, default=1)
    _add_sss(sim)
    sim.set_defaults(func=cmd_simulate)

    bnd = sub.add_parser("bounds", help="analytic success-probability curves over a T grid")
    _add_grid(bnd, 0, 250, 10)
    bnd.set_defaults(func=cmd_bounds)

    rat = sub.add_parser("rates", help="asymptotic rate bounds over a beta grid")
    rat.add_argument("--beta-min", dest="beta_min", type=float, default=0.01)
    rat.add_argument("--beta-max", dest="beta_max", type=float, default=1.0)
    rat.add_argument("--step", type=float, default=0.01)
    rat.add_argument("--out", default=None)
    rat.set_defaults(func=cmd_rates)

    dec = sub.add_parser("decode", help="run one decoder on an instance file")
    dec.add_argument("instance")
    dec.add_argument("--algorithm", type=str.upper, choices=ALGORITHMS, default="SCOMP")
    dec.add_argument("--known-k", dest="known_k", type=int, default=None)
    _add_sss(dec)
    dec.set_defaults(func=cmd_decode)

    chk = sub.add_parser("check-design", help="exhaustive disjunct/separable verdicts")
    chk.add_argument("instance")
    chk.add_argument("--k", type=int, required=True)
    chk.add_argument("--cap", type=int, default=DEFAULT_SUBSET_CAP)
    chk.set_defaults(func=cmd_check_design)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already reported
        return exc.code
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"grouptest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceFormatError, OSError) as exc:
        print(f"grouptest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DecodeError, SweepAborted, DesignTooLargeError, ValueError) as exc:
        print(f"grouptest: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
