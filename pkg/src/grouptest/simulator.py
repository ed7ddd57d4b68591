"""Monte Carlo harness: random Bernoulli designs, decoder runs, success tallies.

Every trial draws its defective set and matrix from a stream keyed by
``(seed, T, trial_index)``, so results depend on the configuration alone and
not on how trials are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DesignParams, compute_outcomes, generate_bernoulli_design
from .decoders import ALGORITHMS, SearchBudgetExhausted, SssOptions, decode

SUCCESS, FAILURE, EXHAUSTED = "success", "failure", "budget_exhausted"
MAX_EXHAUSTED_FRACTION = 0.01


class SweepAborted(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    n_items: int = 500
    n_defectives: int = 10
    inclusion_prob: Optional[float] = None  # defaults to 1/K
    t_values: Sequence[int] = tuple(range(50, 251, 10))
    trials: int = 1000
    seed: int = 1
    algorithms: Sequence[str] = ALGORITHMS
    sss_options: SssOptions = SssOptions()

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.t_values or any(t < 0 for t in self.t_values):
            raise ValueError("t_values must be a non-empty list of non-negative integers")
        if not 0 <= self.n_defectives <= self.n_items:
            raise ValueError("need 0 <= K <= N")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        unknown = [a for a in self.algorithms if a.upper() not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}")
        object.__setattr__(self, "t_values", tuple(int(t) for t in self.t_values))
        object.__setattr__(self, "algorithms", tuple(a.upper() for a in self.algorithms))

    @property
    def p(self) -> float:
        if self.inclusion_prob is not None:
            return self.inclusion_prob
        return 1.0 / max(self.n_defectives, 1)


@dataclass(frozen=True)
class Tally:
    successes: int = 0
    failures: int = 0
    exhausted: int = 0

    def __add__(self, other: "Tally") -> "Tally":
        return Tally(self.successes + other.successes, self.failures + other.failures,
                     self.exhausted + other.exhausted)

    @classmethod
    def of(cls, status: str) -> "Tally":
        return cls(status == SUCCESS, status == FAILURE, status == EXHAUSTED)


@dataclass(frozen=True)
class SweepRow:
    t: int
    algorithm: str
    trials: int
    successes: int
    success_rate: float
    stderr: float
    budget_exhausted: int


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple = field(default_factory=tuple)

    def row(self, t: int, algorithm: str) -> SweepRow:
        for r in self.rows:
            if r.t == t and r.algorithm == algorithm:
                return r
        raise KeyError((t, algorithm))

    def rate(self, t: int, algorithm: str) -> float:
        return self.row(t, algorithm).success_rate


def trial_streams(seed: int, t: int, trial_index: int) -> tuple[int, int]:
    """Two 64-bit seeds (defective set, design) hashed from the trial key."""
    ss = np.random.SeedSequence([seed, t, trial_index])
    a, b = ss.generate_state(2, dtype=np.uint64)
    return int(a), int(b)


def run_trial(config: SweepConfig, t: int, trial_index: int) -> dict[str, str]:
    """Status of every requested algorithm on one random instance.

    Success means the estimate equals the defective set exactly; SSS budget
    exhaustion is reported as its own status.
    """
    n, k = config.n_items, config.n_defectives
    defect_seed, design_seed = trial_streams(config.seed, t, trial_index)
    rng = np.random.Generator(np.random.PCG64(defect_seed))
    truth = frozenset(int(i) + 1 for i in rng.choice(n, size=k, replace=False))
    X = generate_bernoulli_design(DesignParams(n, t, config.p, design_seed))
    y = compute_outcomes(X, truth)

    status = {}
    for name in config.algorithms:
        try:
            out = decode(name, X, y, config.sss_options)
        except SearchBudgetExhausted:
            status[name] = EXHAUSTED
            continue
        status[name] = SUCCESS if out.estimate == truth else FAILURE
        if name == "COMP" and (out.estimate == truth) != (len(out.pd_set) == k):
            raise AssertionError("COMP success must coincide with |PD| = K")
    return status


def _tally_block(args) -> dict[str, Tally]:
    config, t, start, stop = args
    acc = {name: Tally() for name in config.algorithms}
    for i in range(start, stop):
        for name, st in run_trial(config, t, i).items():
            acc[name] = acc[name] + Tally.of(st)
    return acc


def summarize(config: SweepConfig, tallies: dict[tuple[int, str], Tally]) -> SweepResult:
    rows = []
    for t in config.t_values:
        for name in config.algorithms:
            tal = tallies[(t, name)]
            counted = tal.successes + tal.failures
            rate = tal.successes / counted if counted else float("nan")
            err = math.sqrt(rate * (1 - rate) / counted) if counted else float("nan")
            rows.append(SweepRow(t, name, counted, tal.successes, rate, err, tal.exhausted))
    return SweepResult(config, tuple(rows))


def run_sweep(config: SweepConfig, workers: int = 1, block_size: int = 50) -> SweepResult:
    """Aggregate ``run_trial`` over every (T, trial) pair.

    Raises :class:`SweepAborted` if more than 1% of SSS trials at any T
    exhaust their node budget.
    """
    jobs = [(config, t, s, min(s + block_size, config.trials))
            for t in config.t_values for s in range(0, config.trials, block_size)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_tally_block, jobs))
    else:
        parts = [_tally_block(job) for job in jobs]

    tallies = {(t, name): Tally() for t in config.t_values for name in config.algorithms}
    for (_, t, _, _), part in zip(jobs, parts):
        for name, tal in part.items():
            tallies[(t, name)] = tallies[(t, name)] + tal

    for (t, name), tal in tallies.items():
        if tal.exhausted > MAX_EXHAUSTED_FRACTION * config.trials:
            raise SweepAborted(
                f"{name} exhausted its node budget in {tal.exhausted} of {config.trials} trials at T={t}"
            )
    return summarize(config, tallies)
