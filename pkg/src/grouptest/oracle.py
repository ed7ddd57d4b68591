"""Brute-force ground truth at tiny scale, in exact rational arithmetic.

Nothing here reuses the analytic formulas; the decoders are only called as
black boxes on every enumerated matrix.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import ItemSet, TestMatrix, compute_outcomes
from .decoders import SearchBudgetExhausted, decode

MAX_ENUM_ITEMS = 20
MAX_MATRIX_CELLS = 16


class OracleTooLargeError(ValueError):
    pass


def _outcome_codes(X: TestMatrix) -> np.ndarray:
    """``codes[s]`` is the OR of the columns of subset s (bit i of s is item i+1),
    packed so that bit t stands for test t+1."""
    n = X.n_items
    weights = np.uint64(1) << np.arange(X.n_tests, dtype=np.uint64)
    cols = (X.bits.astype(np.uint64) * weights[:, None]).sum(axis=0, dtype=np.uint64)
    codes = np.zeros(1 << n, dtype=np.uint64)
    for i in range(n):
        half = 1 << i
        codes[half:2 * half] = codes[:half] | cols[i]
    return codes


def _subset(s: int) -> ItemSet:
    return ItemSet(i + 1 for i in range(s.bit_length()) if s >> i & 1)


def _sort_key(items: ItemSet):
    return (len(items), sorted(items))


def enumerate_satisfying(X: TestMatrix, y, smallest_only: bool = False) -> list[ItemSet]:
    """Every satisfying set, found by scanning all 2^N subsets.

    Sorted by size and then lexicographically by sorted members.
    With ``smallest_only`` only the minimum-size ones are returned.
    """
    if X.n_items > MAX_ENUM_ITEMS:
        raise OracleTooLargeError(f"enumeration limited to N <= {MAX_ENUM_ITEMS}")
    if X.n_tests > 64:
        raise OracleTooLargeError("enumeration limited to T <= 64")
    y = np.asarray(y, dtype=bool)
    target = np.uint64(sum(1 << t for t in np.flatnonzero(y).tolist()))
    codes = _outcome_codes(X)
    hits = np.flatnonzero(codes == target)
    if smallest_only and hits.size:
        sizes = np.bitwise_count(hits.astype(np.uint64))
        hits = hits[sizes == sizes.min()]
    return sorted((_subset(int(s)) for s in hits), key=_sort_key)


def exact_success_by_exhaustion(n: int, k_set: Iterable[int], t: int, p, algorithm: str,
                                sss_options=None) -> Fraction:
    """Exact success probability of ``algorithm`` over all 2^(n t) Bernoulli(p) matrices.

    Each matrix carries weight p^ones (1-p)^zeros; it counts as a success
    when the decoder's estimate equals ``k_set``. SSS budget exhaustion
    counts as failure.
    """
    if n * t > MAX_MATRIX_CELLS:
        raise OracleTooLargeError(f"exhaustion limited to n*t <= {MAX_MATRIX_CELLS}")
    p = Fraction(p)
    truth = ItemSet(k_set)
    cells = n * t
    weight_by_ones = [p**j * (1 - p) ** (cells - j) for j in range(cells + 1)]
    kwargs = {} if sss_options is None else {"sss_options": sss_options}
    total = Fraction(0)
    for code in range(1 << cells):
        bits = np.array([(code >> c) & 1 for c in range(cells)], dtype=bool).reshape(t, n)
        X = TestMatrix(bits)
        y = compute_outcomes(X, truth)
        try:
            est = decode(algorithm, X, y, **kwargs).estimate
        except SearchBudgetExhausted:
            continue
        if est == truth:
            total += weight_by_ones[code.bit_count()]
    return total


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def mask_probability_oracle(k: int, q, m: int) -> Fraction:
    """P(first k classes all non-empty) for m multinomial trials over classes
    with probabilities (q, ..., q, 1 - kq).

    Assignments of trials to classes are grouped by their count vector, each
    weighted by its multinomial coefficient.
    """
    if k > 4 or m > 8:
        raise OracleTooLargeError("multinomial enumeration limited to k <= 4, m <= 8")
    q = Fraction(q)
    rest = 1 - k * q
    if q < 0 or rest < 0:
        raise ValueError("need 0 <= k*q <= 1")
    total = Fraction(0)
    for counts in _compositions(m, k + 1):
        if all(c > 0 for c in counts[:k]):
            ways = math.factorial(m)
            for c in counts:
                ways //= math.factorial(c)
            total += ways * q ** sum(counts[:k]) * rest ** counts[k]
    return total

