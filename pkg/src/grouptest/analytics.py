"""Closed-form success-probability bounds and rate curves for Bernoulli designs.

Functions accept floats; ``phi_k``, ``dd_success_exact`` and ``q_value``
also accept :class:`fractions.Fraction` arguments and then return an exact
rational, which is what the brute-force oracle comparisons use.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

E_LN2 = math.e * math.log(2.0)
# sparsity above which the SSS rate bound no longer falls below capacity
BETA_STAR = E_LN2 / (1.0 + E_LN2)

CLAMP_WARN = 1e-6
# largest alternating-sum error tolerated before switching to the occupancy recursion
PHI_ERROR_BUDGET = 1e-13


class NumericalStabilityWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class InstanceParams:
    n_items: int
    n_defectives: int
    inclusion_prob: float
    n_tests: int

    def __post_init__(self):
        if self.n_items < 1 or self.n_defectives < 0 or self.n_tests < 0:
            raise ValueError("need N >= 1, K >= 0, T >= 0")
        if self.n_defectives > self.n_items:
            raise ValueError("K cannot exceed N")

    @property
    def q0(self):
        """Probability a test contains no defective."""
        return (1 - self.inclusion_prob) ** self.n_defectives

    @property
    def q1(self):
        """Probability a test contains one given defective and no other."""
        p = self.inclusion_prob
        return p * (1 - p) ** (self.n_defectives - 1)


@dataclass(frozen=True)
class SparsityPoint:
    beta: float
    value: float


@dataclass(frozen=True)
class RateBounds:
    beta: float
    capacity_upper: float
    comp_lower: float
    dd_lower: float
    sss_upper: float
    k_beta: float


@dataclass(frozen=True)
class PhaseThresholds:
    t_success: int
    t_fail: int


def _require_open_p(p) -> None:
    if not 0 < p < 1:
        raise ValueError(f"inclusion probability must lie in (0, 1), got {p}")


def clamp_probability(x: float, what: str = "probability") -> float:
    if x < -CLAMP_WARN or x > 1 + CLAMP_WARN:
        warnings.warn(f"{what} evaluated to {x!r}, clamping to [0, 1]", NumericalStabilityWarning,
                      stacklevel=3)
    return min(1.0, max(0.0, x))


def log_binom(n: int, k: int) -> float:
    """Natural log of C(n, k) via log-gamma."""
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _log_binom_array(n, k):
    from scipy.special import gammaln
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def binomial_pmf(n: int, theta: float, m):
    """Bin(n, theta; m) from log-space, with theta in {0, 1} handled exactly."""
    m = np.asarray(m)
    if theta <= 0.0:
        return (m == 0).astype(float)
    if theta >= 1.0:
        return (m == n).astype(float)
    return np.exp(_log_binom_array(n, m) + m * math.log(theta) + (n - m) * math.log1p(-theta))


# ---------------------------------------------------------------------------
# phi_K: probability that K symmetric multinomial classes are all hit
# ---------------------------------------------------------------------------


def _phi_exact(k: int, q: Fraction, t: int) -> Fraction:
    return sum(((-1) ** l * math.comb(k, l) * (1 - l * q) ** t for l in range(k + 1)), Fraction(0))


def _phi_occupancy_table(k: int, q, t: int) -> np.ndarray:
    """phi_K(q, r) for r = 0..t by recursion over the number of occupied classes.

    Each trial hits a new class with probability (k - j) q when j are
    occupied; every quantity is non-negative, so there is no cancellation.
    Vectorised over an array ``q``: the result has shape (t + 1, len(q)).
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    dist = np.zeros((k + 1,) + q.shape)
    dist[0] = 1.0
    move = np.array([(k - j) * q for j in range(k)])
    table = np.empty((t + 1,) + q.shape)
    table[0] = dist[k]
    for r in range(1, t + 1):
        flow = dist[:-1] * move
        dist[:-1] -= flow
        dist[1:] += flow
        table[r] = dist[k]
    return table


def phi_k(k: int, q, t: int):
    """Probability that all ``k`` classes of a (q, ..., q, 1 - kq) multinomial
    with ``t`` trials are non-empty: sum_l (-1)^l C(k,l) (1 - l q)^t.

    The alternating sum is evaluated from log-magnitudes and summed exactly
    with :func:`math.fsum`; if its rounding error could exceed
    ``PHI_ERROR_BUDGET`` the cancellation-free occupancy recursion is used
    instead. A Fraction ``q`` gives an exact Fraction.
    """
    if k < 0 or t < 0:
        raise ValueError("k and t must be non-negative")
    if q < 0 or k * q > 1 + 1e-12:
        raise ValueError(f"need 0 <= k*q <= 1, got k={k}, q={q}")
    if isinstance(q, Fraction):
        return _phi_exact(k, q, t)
    if k == 0:
        return 1.0
    if t == 0:
        return 0.0
    q = float(q)
    terms = []
    magnitude = 0.0
    for l in range(k + 1):
        base = 1.0 - l * q
        if base <= 0.0:  # only when l*q == 1 up to rounding; the term is 0
            continue
        mag = math.exp(log_binom(k, l) + t * math.log(base))
        magnitude += mag
        terms.append(-mag if l % 2 else mag)
    value = math.fsum(terms)
    if magnitude * 4 * (k + 1) * 2.0**-52 > PHI_ERROR_BUDGET:
        value = float(_phi_occupancy_table(k, q, t)[t, 0])
    return clamp_probability(value, "phi_k")


# ---------------------------------------------------------------------------
# Success-probability bounds
# ---------------------------------------------------------------------------


def _dd_exact_rational(params: InstanceParams) -> Fraction:
    n, k, t = params.n_items, params.n_defectives, params.n_tests
    p = Fraction(params.inclusion_prob)
    q0, q1 = params.q0, params.q1
    total = Fraction(0)
    for m0 in range(t + 1):
        w_m0 = math.comb(t, m0) * q0**m0 * (1 - q0) ** (t - m0)
        theta = (1 - p) ** m0
        for g in range(n - k + 1):
            w_g = math.comb(n - k, g) * theta**g * (1 - theta) ** (n - k - g)
            if w_m0 and w_g:
                q_star = q1 * (1 - p) ** g / (1 - q0)
                total += w_m0 * w_g * _phi_exact(k, q_star, t - m0)
    return total


def dd_success_exact(params: InstanceParams):
    """Exact DD success probability under a Bernoulli(p) design.

    Sums over the number m0 of defective-free tests and the number g of
    intruding non-defectives; given both, success is phi_K(q*(g), T - m0)
    with q*(g) = q1 (1-p)^g / (1 - q0). A Fraction ``inclusion_prob`` yields
    an exact Fraction.
    """
    p = params.inclusion_prob
    _require_open_p(p)
    n, k, t = params.n_items, params.n_defectives, params.n_tests
    if k == 0:
        return Fraction(1) if isinstance(p, Fraction) else 1.0
    if isinstance(p, Fraction):
        return _dd_exact_rational(params)
    p = float(p)
    q0 = (1 - p) ** k
    q1 = p * (1 - p) ** (k - 1)
    m0 = np.arange(t + 1)
    g = np.arange(n - k + 1)
    w_m0 = binomial_pmf(t, q0, m0)
    q_star = q1 * (1 - p) ** g / (1 - q0)
    phi_by_r = _phi_occupancy_table(k, q_star, t)  # row r is phi_K(q*(g), r)
    total = 0.0
    for j in range(t + 1):
        if w_m0[j] == 0.0:
            continue
        w_g = binomial_pmf(n - k, (1 - p) ** j, g)
        total += w_m0[j] * float(np.dot(w_g, phi_by_r[t - j]))
    return clamp_probability(total, "dd_success_exact")


def dd_theta(params: InstanceParams, m0: int) -> float:
    """Exponent in the DD lower bound for a given number of defective-free tests."""
    p = float(params.inclusion_prob)
    n, k, t = params.n_items, params.n_defectives, params.n_tests
    q0 = (1 - p) ** k
    q1 = p * (1 - p) ** (k - 1)
    rate = q1 * (t - m0) / (1 - q0)
    return n * (1 - p) ** m0 * math.expm1(p * rate) - rate


def dd_success_lower(params: InstanceParams) -> float:
    """Lower bound sum_m0 Bin(T, q0; m0) max{0, 1 - K exp(Theta(T, m0))} on DD success."""
    p = params.inclusion_prob
    _require_open_p(p)
    k, t = params.n_defectives, params.n_tests
    if k == 0:
        return 1.0
    q0 = (1 - float(p)) ** k
    w = binomial_pmf(t, q0, np.arange(t + 1))
    total = 0.0
    for m0 in range(t + 1):
        theta = dd_theta(params, m0)
        inner = 0.0 if theta > 700 else max(0.0, 1.0 - k * math.exp(theta))
        total += w[m0] * inner
    return clamp_probability(total, "dd_success_lower")


def comp_success_lower(params: InstanceParams) -> float:
    """COMP success is at least 1 - (N - K)(1 - p(1-p)^K)^T."""
    n, k, t = params.n_items, params.n_defectives, params.n_tests
    p = float(params.inclusion_prob)
    if n == k:
        return 1.0
    miss = 1.0 - p * (1.0 - p) ** k
    return max(0.0, 1.0 - (n - k) * miss**t)


def info_bound(n: int, k: int, t: int) -> float:
    """Counting bound min{1, 2^T / C(N, K)} on any algorithm's success."""
    log_value = t * math.log(2.0) - log_binom(n, k)
    return 1.0 if log_value >= 0 else math.exp(log_value)


def q_value(k: int, l: int, b: int, p):
    """Probability one Bernoulli(p) test separates defective sets of sizes k and l
    sharing b items."""
    s = 1 - p
    return s**k + s**l - 2 * s ** (k + l - b)


def sss_success_lower(params: InstanceParams) -> float:
    """Union-bound lower bound on SSS success over the smaller or equal-size rivals
    that are not contained in a larger rival event."""
    n, k, t = params.n_items, params.n_defectives, params.n_tests
    p = float(params.inclusion_prob)
    if k == 0:
        return 1.0
    err = k * (1.0 - q_value(k, k - 1, k - 1, p)) ** t
    for b in range(k):
        if k - b > n - k:
            continue
        miss = 1.0 - q_value(k, k, b, p)
        if miss <= 0.0:
            continue
        err += math.exp(log_binom(k, b) + log_binom(n - k, k - b) + t * math.log(miss))
    return max(0.0, 1.0 - err)


def sss_success_upper(k: int, t: int) -> float:
    """phi_K(1/(e(K-1)), T): SSS fails whenever some defective is masked by the others.

    The bound is vacuous (1) for K <= 1.
    """
    if k <= 1:
        return 1.0
    return phi_k(k, 1.0 / (math.e * (k - 1)), t)


# ---------------------------------------------------------------------------
# Rates
# ---------------------------------------------------------------------------


def k_beta(beta: float) -> float:
    return max(beta, 1.0 - beta)


def rate_bounds(beta: float) -> RateBounds:
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if beta == 1:
        ratio = math.inf
    else:
        ratio = beta / (1.0 - beta)
    return RateBounds(
        beta=beta,
        capacity_upper=1.0,
        comp_lower=beta / E_LN2,
        dd_lower=min(1.0, ratio) / E_LN2,
        sss_upper=min(1.0, ratio / E_LN2),
        k_beta=k_beta(beta),
    )


def rate_curve(field_name: str, betas: Iterable[float]) -> list[SparsityPoint]:
    """One column of :func:`rate_bounds` as a list of (beta, value) points."""
    return [SparsityPoint(b, getattr(rate_bounds(b), field_name)) for b in betas]


def beta_eff(n: int, k: int) -> float:
    """Effective sparsity 1 - ln K / ln N of a finite instance."""
    if n < 2:
        raise ValueError("beta_eff needs n >= 2")
    if not 1 <= k <= n:
        raise ValueError("beta_eff needs 1 <= k <= n")
    return 1.0 - math.log(k) / math.log(n)


def phase_transition_thresholds(k: int, delta_prime: float) -> PhaseThresholds:
    """Test counts around which phi_K(1/(e(K-1)), T) switches from <= 2/3 to >= 1 - K^-delta'."""
    if k < 3:
        raise ValueError("phase transition thresholds need k >= 3")
    if delta_prime <= 0:
        raise ValueError("delta_prime must be positive")
    log_k = math.log(k)
    return PhaseThresholds(
        t_success=math.ceil(math.e * (1 + delta_prime) * (k - 1) * log_k),
        t_fail=math.floor((math.e * (k - 1) - 1) * log_k),
    )
