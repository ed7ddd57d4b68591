"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line in ``REPORT``; conftest prints them in
the terminal summary. Running this file directly also prints them:

    python3 tests/test_acceptance.py
"""

import math
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from grouptest.analytics import (BETA_STAR, InstanceParams, beta_eff, comp_success_lower,
                                 dd_success_exact, info_bound, phase_transition_thresholds, phi_k,
                                 rate_bounds, sss_success_lower, sss_success_upper)
from grouptest.cli import main
from grouptest.core import DesignParams, compute_outcomes, generate_bernoulli_design
from grouptest.decoders import SssOptions, sss_decode
from grouptest.oracle import enumerate_satisfying, exact_success_by_exhaustion, mask_probability_oracle
from grouptest.simulator import SweepConfig, run_sweep

REPORT = {}

N, K, P, TRIALS = 500, 10, 0.1, 1000
T_GRID = tuple(range(50, 251, 10))
SWEEP_BUDGET_S = 15 * 60


def record(n, ok, detail):
    REPORT[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, REPORT[n]


@pytest.fixture(scope="session")
def figure2_sweep():
    cfg = SweepConfig(n_items=N, n_defectives=K, inclusion_prob=P, t_values=T_GRID,
                      trials=TRIALS, seed=1)
    start = time.perf_counter()
    result = run_sweep(cfg, workers=os.cpu_count() or 1)
    return result, time.perf_counter() - start


def _pooled_sigma(a, b):
    pooled = (a.successes + b.successes) / (a.trials + b.trials)
    return math.sqrt(pooled * (1 - pooled) * (1 / a.trials + 1 / b.trials))


def _bound_sigma(row, bound):
    r = row.success_rate
    return math.sqrt(max(r * (1 - r), bound * (1 - bound)) / row.trials)


def test_criterion_1_dd_formula_matches_exhaustion():
    start = time.perf_counter()
    mismatches, cases = [], 0
    for n in range(1, 5):
        for t in range(0, 4):
            for p in (Fraction(1, 2), Fraction(1, 3)):
                for k in range(0, min(2, n) + 1):
                    cases += 1
                    formula = dd_success_exact(InstanceParams(n, k, p, t))
                    brute = exact_success_by_exhaustion(n, range(1, k + 1), t, p, "DD")
                    if formula != brute:
                        mismatches.append((n, k, t, p, formula, brute))
    anchor = dd_success_exact(InstanceParams(2, 1, Fraction(1, 2), 1))
    elapsed = time.perf_counter() - start
    ok = not mismatches and anchor == Fraction(1, 4) and elapsed < 60
    record(1, ok, f"{cases} instances, {len(mismatches)} mismatches, "
                  f"N=2,K=1,T=1 value {anchor}, {elapsed:.1f}s")


def test_criterion_2_sss_matches_enumeration():
    rng = np.random.default_rng(20240601)
    start = time.perf_counter()
    bad = []
    for idx in range(200):
        n = int(rng.integers(1, 21))
        k = int(rng.integers(0, min(4, n) + 1))
        t = int(rng.integers(0, 16))
        p = float(rng.uniform(0.05, 0.6))
        X = generate_bernoulli_design(DesignParams(n, t, p, seed=idx))
        truth = frozenset(int(i) + 1 for i in rng.choice(n, size=k, replace=False))
        y = compute_outcomes(X, truth)
        want = enumerate_satisfying(X, y, smallest_only=True)[0]
        for dd in (True, False):
            got = sss_decode(X, y, SssOptions(use_dd_preprocessing=dd)).estimate
            if got != want:
                bad.append((idx, dd, sorted(got), sorted(want)))
    elapsed = time.perf_counter() - start
    record(2, not bad and elapsed < 120,
           f"200 instances, {len(bad)} disagreements, {elapsed:.1f}s")


def test_criterion_3_decoder_ordering(figure2_sweep):
    result, elapsed = figure2_sweep
    worst = math.inf
    failures = []
    for t in T_GRID:
        for lo, hi in (("COMP", "DD"), ("DD", "SCOMP"), ("SCOMP", "SSS")):
            a, b = result.row(t, lo), result.row(t, hi)
            slack = b.success_rate + 2 * _pooled_sigma(a, b) - a.success_rate
            worst = min(worst, slack)
            if slack < 0:
                failures.append((t, lo, hi))
    ok = not failures and elapsed <= SWEEP_BUDGET_S
    record(3, ok, f"{len(failures)} ordering violations, min slack {worst:.4f}, "
                  f"sweep {elapsed:.0f}s")


def test_criterion_4_dd_rate_matches_formula(figure2_sweep):
    # sigma from the model probability; the row stderr is also reported
    result, _ = figure2_sweep
    worst, worst_row, failures = 0.0, 0.0, []
    for t in T_GRID:
        row = result.row(t, "DD")
        exact = dd_success_exact(InstanceParams(N, K, P, t))
        sigma = math.sqrt(exact * (1 - exact) / row.trials)
        dev = abs(row.success_rate - exact)
        z = dev / sigma if sigma > 0 else (0.0 if dev == 0 else math.inf)
        worst = max(worst, z)
        if row.stderr > 0:
            worst_row = max(worst_row, dev / row.stderr)
        if z > 3:
            failures.append(t)
    record(4, not failures, f"max |z| = {worst:.2f} over {len(T_GRID)} T values, "
                            f"exceeding 3 at T={failures} (row-stderr max |z| = {worst_row:.2f})")


def test_criterion_5_bound_sandwiches(figure2_sweep):
    result, _ = figure2_sweep
    failures = []
    for t in T_GRID:
        params = InstanceParams(N, K, P, t)
        comp = result.row(t, "COMP")
        lower = comp_success_lower(params)
        if comp.success_rate < lower - 3 * _bound_sigma(comp, lower):
            failures.append((t, "COMP lower"))
        sss = result.row(t, "SSS")
        upper = min(sss_success_upper(K, t), info_bound(N, K, t))
        if sss.success_rate > upper + 3 * _bound_sigma(sss, upper):
            failures.append((t, "SSS upper"))
        lower = sss_success_lower(params)
        if sss.success_rate < lower - 3 * _bound_sigma(sss, lower):
            failures.append((t, "SSS lower"))
    record(5, not failures, f"{len(failures)} violations {failures}")


def test_criterion_6_phi_properties():
    rng = np.random.default_rng(6)
    bonf_worst, mono_worst = 0.0, 0.0
    for _ in range(10_000):
        k = int(rng.integers(1, 21))
        t = int(rng.integers(0, 201))
        q1, q2 = np.sort(rng.uniform(0, 1 / k, size=2))
        v = phi_k(k, float(q1), t)
        lo = max(0.0, 1 - k * (1 - q1) ** t)
        hi = 1 - k * (1 - q1) ** t + k * k / 2 * max(0.0, 1 - 2 * q1) ** t
        bonf_worst = max(bonf_worst, lo - v, v - hi)
        mono_worst = max(mono_worst, v - phi_k(k, float(q2), t))
    oracle_bad = 0
    for k in range(1, 5):
        for q in (Fraction(1, 5 * k), Fraction(1, 2 * k), Fraction(1, k), Fraction(3, 7 * k)):
            for m in range(9):
                oracle_bad += mask_probability_oracle(k, q, m) != phi_k(k, q, m)
    ok = bonf_worst <= 1e-9 and mono_worst <= 1e-12 and oracle_bad == 0
    record(6, ok, f"Bonferroni excess {bonf_worst:.2e}, monotonicity excess {mono_worst:.2e}, "
                  f"{oracle_bad} oracle mismatches")


def test_criterion_7_phase_transition():
    k, delta = 100, 0.5
    th = phase_transition_thresholds(k, delta)
    q = 1 / (math.e * (k - 1))
    hi, lo = phi_k(k, q, th.t_success), phi_k(k, q, th.t_fail)
    ok = hi >= 0.9 - 1e-9 and lo <= 2 / 3 + 1e-9
    record(7, ok, f"phi(T={th.t_success}) = {hi:.5f} >= 0.9, phi(T={th.t_fail}) = {lo:.5f} <= 2/3")


def test_criterion_8_constants():
    vals = {
        "beta_eff(500,4)": (round(beta_eff(500, 4), 4), 0.7769),
        "beta_eff(500,25)": (round(beta_eff(500, 25), 4), 0.4820),
        "comp_lower(1)": (round(rate_bounds(1.0).comp_lower, 4), 0.5307),
        "beta_star": (round(BETA_STAR, 3), 0.653),
    }
    bad = [name for name, (got, want) in vals.items() if got != want]
    record(8, not bad, ", ".join(f"{n}={g}" for n, (g, _) in vals.items()))


def test_criterion_9_worker_invariance(tmp_path):
    args = ["simulate", "--N", "500", "--K", "10", "--Tmin", "50", "--Tmax", "250", "--Tstep", "50",
            "--trials", "40", "--seed", "1"]
    outs = []
    for workers in (1, 2, 3):
        path = tmp_path / f"w{workers}.csv"
        assert main(args + ["--workers", str(workers), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    record(9, outs[0] == outs[1] == outs[2], "CSV byte-identical for --workers 1, 2, 3")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
