"""COMP, DD, SCOMP and SSS detection algorithms.

Every decoder maps ``(X, y)`` to a :class:`DecodeOutput`; estimates are
frozensets of 1-based item indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import ItemSet, TestMatrix, _check_outcomes, to_item_set

ALGORITHMS = ("COMP", "DD", "SCOMP", "SSS")
DEFAULT_NODE_LIMIT = 10**7


class DecodeError(RuntimeError):
    pass


class SearchBudgetExhausted(DecodeError):
    """SSS ran out of branch-and-bound nodes before proving optimality."""

    def __init__(self, node_limit: int):
        super().__init__(f"search budget exhausted after {node_limit} nodes")
        self.node_limit = node_limit


class InfeasibleSizeError(DecodeError):
    """No satisfying set of the requested size exists."""


class InconsistentOutcomesError(DecodeError):
    """Some positive test contains no possible defective, so nothing satisfies y."""


@dataclass(frozen=True)
class DecodeOutput:
    estimate: ItemSet
    pd_set: ItemSet
    dd_set: ItemSet
    stats: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SssOptions:
    use_dd_preprocessing: bool = True
    known_k: Optional[int] = None
    node_limit: int = DEFAULT_NODE_LIMIT
    tie_rule: str = "lexicographic"

    def __post_init__(self):
        if self.node_limit < 1:
            raise ValueError("node_limit must be at least 1")
        if self.known_k is not None and self.known_k < 1:
            raise ValueError("known_k must be positive")
        if self.tie_rule != "lexicographic":
            raise ValueError("only the lexicographic tie rule is supported")


def _possible_defectives(X: TestMatrix, y: np.ndarray) -> np.ndarray:
    """Boolean mask of items that appear in no negative test."""
    return ~X.bits[~y].any(axis=0)


def _definite_defectives(X: TestMatrix, y: np.ndarray, pd: np.ndarray) -> np.ndarray:
    sub = X.bits[:, pd]
    lonely = y & (sub.sum(axis=1) == 1)
    dd_local = sub[lonely].any(axis=0)
    dd = np.zeros_like(pd)
    dd[np.flatnonzero(pd)[dd_local]] = True
    return dd


def comp_decode(X: TestMatrix, y) -> DecodeOutput:
    """Declare every possible defective to be defective."""
    y = _check_outcomes(X, y)
    pd = _possible_defectives(X, y)
    dd = _definite_defectives(X, y, pd)
    pd_set = to_item_set(pd)
    return DecodeOutput(pd_set, pd_set, to_item_set(dd), {"pd_size": len(pd_set)})


def dd_decode(X: TestMatrix, y) -> DecodeOutput:
    """Declare defective only those PD items that are alone among PD in some positive test."""
    y = _check_outcomes(X, y)
    pd = _possible_defectives(X, y)
    dd = _definite_defectives(X, y, pd)
    dd_set = to_item_set(dd)
    return DecodeOutput(dd_set, to_item_set(pd), dd_set, {"pd_size": int(pd.sum())})


def _greedy_extend(X: TestMatrix, y: np.ndarray, pd: np.ndarray, start: np.ndarray):
    """Greedily add the PD item covering most unexplained tests, lowest index on ties."""
    est = start.copy()
    unexplained = y & ~X.bits[:, est].any(axis=1)
    steps = 0
    while unexplained.any():
        counts = X.bits[unexplained].sum(axis=0)
        counts[~pd | est] = -1
        best = int(np.argmax(counts))
        if counts[best] <= 0:
            raise InconsistentOutcomesError(
                "a positive test contains no possible defective; no satisfying set exists"
            )
        est[best] = True
        unexplained &= ~X.bits[:, best]
        steps += 1
    return est, steps


def scomp_decode(X: TestMatrix, y) -> DecodeOutput:
    """Extend the DD estimate greedily until it explains every positive test."""
    y = _check_outcomes(X, y)
    pd = _possible_defectives(X, y)
    dd = _definite_defectives(X, y, pd)
    est, steps = _greedy_extend(X, y, pd, dd)
    return DecodeOutput(
        to_item_set(est), to_item_set(pd), to_item_set(dd),
        {"pd_size": int(pd.sum()), "greedy_steps": steps},
    )


# ---------------------------------------------------------------------------
# SSS: exact minimum satisfying set by branch and bound
# ---------------------------------------------------------------------------


def _bits_of(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _CoverSearch:
    """Minimum set cover over test bitmasks with node accounting.

    ``masks[j]`` is the set of (reduced) positive tests covered by candidate
    ``j``; candidates are ordered by item index so that :meth:`lex_first`
    can build the lexicographically smallest cover position by position.
    """

    def __init__(self, masks: list[int], universe: int, node_limit: int):
        self.masks = masks
        self.universe = universe
        self.node_limit = node_limit
        self.nodes = 0
        self.n_elements = universe.bit_length()

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise SearchBudgetExhausted(self.node_limit)

    def min_cover(self, uncovered: int, start: int, cap: int) -> Optional[int]:
        """Minimum number of candidates ``j >= start`` covering ``uncovered``.

        Returns None when that minimum exceeds ``cap``.
        """
        if not uncovered:
            return 0
        masks = self.masks
        # restrict to useful candidates, then drop dominated and duplicate ones
        pool = [(masks[j] & uncovered, j) for j in range(start, len(masks))]
        pool = sorted((p for p in pool if p[0]), key=lambda p: -p[0].bit_count())
        kept: list[int] = []
        for mj, _ in pool:
            if not any(mj | k == k for k in kept):
                kept.append(mj)
        coverers: dict[int, list[int]] = {e: [] for e in _bits_of(uncovered)}
        for idx, mj in enumerate(kept):
            for e in _bits_of(mj):
                coverers[e].append(idx)
        if any(not cs for cs in coverers.values()):
            return None
        neighbourhood = {}
        for e, cs in coverers.items():
            nb = 1 << e
            for idx in cs:
                nb |= kept[idx]
            neighbourhood[e] = nb

        def lower_bound(unc: int) -> int:
            # tests pairwise unshared by any candidate each need their own item
            count = 0
            rest = unc
            while rest:
                e = (rest & -rest).bit_length() - 1
                count += 1
                rest &= ~neighbourhood[e]
            # each chosen candidate absorbs at most one unit of 1/(best coverage)
            gain = [(k & unc).bit_count() for k in kept]
            share = 0.0
            for e in _bits_of(unc):
                share += 1.0 / max(gain[idx] for idx in coverers[e])
            return max(count, math.ceil(share - 1e-9))

        best = cap + 1

        def dfs(unc: int, size: int, banned: int):
            nonlocal best
            self._tick()
            if not unc:
                best = size
                return
            if size + lower_bound(unc) >= best:
                return
            pick_cs = None
            for e in _bits_of(unc):
                cs = [idx for idx in coverers[e] if not banned >> idx & 1]
                if pick_cs is None or len(cs) < len(pick_cs):
                    pick_cs = cs
                    if len(cs) <= 1:
                        break
            if not pick_cs:
                return
            pick_cs.sort(key=lambda idx: -(kept[idx] & unc).bit_count())
            for idx in pick_cs:
                dfs(unc & ~kept[idx], size + 1, banned)
                banned |= 1 << idx
                if size + 1 >= best:
                    return

        dfs(uncovered, 0, 0)
        return best if best <= cap else None

    def lex_first(self, size: int, tight: bool) -> list[int]:
        """Lexicographically smallest cover with exactly ``size`` candidates.

        Fixes one position at a time: the next member is the smallest
        candidate after which the remaining tests still admit a cover by the
        remaining slots. With ``tight`` (``size`` is the optimum) a member
        must cover something new. Assumes a cover of this size exists.
        """
        masks = self.masks
        n = len(masks)
        chosen: list[int] = []
        start, uncovered, slots = 0, self.universe, size
        while slots:
            if not uncovered:
                chosen.extend(range(start, start + slots))
                break
            for j in range(start, n - slots + 1):
                self._tick()
                rest = uncovered & ~masks[j]
                if tight and rest == uncovered:
                    continue
                if rest and self.min_cover(rest, j + 1, slots - 1) is None:
                    continue
                chosen.append(j)
                start, uncovered, slots = j + 1, rest, slots - 1
                break
            else:  # pragma: no cover - callers guarantee feasibility
                raise InfeasibleSizeError(f"no cover of size {size}")
        return chosen


def sss_decode(X: TestMatrix, y, opts: SssOptions = SssOptions()) -> DecodeOutput:
    """Smallest satisfying set, lexicographically first among ties.

    Only PD items can belong to a satisfying set, so the search runs over PD.
    With DD preprocessing the DD items are fixed and the search covers only
    the positive tests they leave unexplained. With ``known_k`` the returned
    set has exactly that many items.

    Raises :class:`SearchBudgetExhausted` if ``opts.node_limit`` is exceeded
    and :class:`InfeasibleSizeError` if no satisfying set has size ``known_k``.
    """
    y = _check_outcomes(X, y)
    pd = _possible_defectives(X, y)
    dd = _definite_defectives(X, y, pd)

    if opts.use_dd_preprocessing:
        fixed = dd
        tests = y & ~X.bits[:, dd].any(axis=1)
    else:
        fixed = np.zeros_like(dd)
        tests = y.copy()
    candidates = np.flatnonzero(pd & ~fixed)
    sub = X.bits[np.ix_(tests, candidates)]
    weights = [1 << t for t in range(sub.shape[0])]
    masks = [sum(w for w, b in zip(weights, col) if b) for col in sub.T.tolist()]
    universe = (1 << sub.shape[0]) - 1

    union = 0
    for mk in masks:
        union |= mk
    if union != universe:
        raise InconsistentOutcomesError(
            "a positive test contains no possible defective; no satisfying set exists"
        )

    search = _CoverSearch(masks, universe, opts.node_limit)
    n_fixed = int(fixed.sum())
    # the SCOMP extension of the fixed items is a cover, so it caps the optimum
    scomp_est, _ = _greedy_extend(X, y, pd, fixed)
    incumbent = int(scomp_est.sum()) - n_fixed
    min_free = search.min_cover(universe, 0, incumbent)

    if opts.known_k is None:
        target = min_free
    else:
        target = opts.known_k - n_fixed
        if target < min_free or target > len(candidates):
            raise InfeasibleSizeError(f"no satisfying set of size {opts.known_k}")
    chosen = search.lex_first(target, tight=(target == min_free))

    est = fixed.copy()
    est[candidates[chosen]] = True
    stats = {
        "pd_size": int(pd.sum()),
        "nodes": search.nodes,
        "reduced_items": len(candidates),
        "reduced_tests": sub.shape[0],
        "incumbent_size": incumbent + n_fixed,
    }
    return DecodeOutput(to_item_set(est), to_item_set(pd), to_item_set(dd), stats)


def decode(algorithm: str, X: TestMatrix, y, sss_options: SssOptions = SssOptions()) -> DecodeOutput:
    name = algorithm.upper()
    if name == "COMP":
        return comp_decode(X, y)
    if name == "DD":
        return dd_decode(X, y)
    if name == "SCOMP":
        return scomp_decode(X, y)
    if name == "SSS":
        return sss_decode(X, y, sss_options)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def harmonic_number(n: int) -> float:
    return sum(1.0 / j for j in range(1, n + 1))
