"""Instance representation for noiseless non-adaptive group testing.

Items and tests are numbered from 1 in every public function and in the
instance file format; the underlying boolean array is 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

ItemSet = frozenset  # 1-based item indices

DEFAULT_SUBSET_CAP = 10**6


class DesignTooLargeError(ValueError):
    """Raised when an exhaustive structural check would exceed its subset cap."""


class InstanceFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TestMatrix:
    """A T x N binary inclusion matrix; ``bits[t, i]`` is True if item i+1 is in test t+1."""

    __test__ = False  # keep pytest from collecting this class

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool, copy=True)
        if bits.ndim != 2:
            raise ValueError(f"test matrix must be 2-D, got shape {bits.shape}")
        if bits.shape[1] < 1:
            raise ValueError("a test matrix needs at least one item")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def n_tests(self) -> int:
        return self.bits.shape[0]

    @property
    def n_items(self) -> int:
        return self.bits.shape[1]

    def row(self, t: int) -> np.ndarray:
        """Membership vector of test ``t`` (1-based)."""
        return self.bits[t - 1]

    def column(self, i: int) -> np.ndarray:
        """Test vector of item ``i`` (1-based)."""
        return self.bits[:, i - 1]

    def test_items(self, t: int) -> ItemSet:
        return ItemSet(int(j) + 1 for j in np.flatnonzero(self.bits[t - 1]))

    def column_masks(self) -> list[int]:
        """Each item's column as a Python int, bit t set iff the item is in test t+1."""
        weights = [1 << t for t in range(self.n_tests)]
        return [sum(w for w, b in zip(weights, col) if b) for col in self.bits.T.tolist()]

    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], n_items: int) -> "TestMatrix":
        """Build from a list of tests, each given as the 1-based items it contains."""
        bits = np.zeros((len(rows), n_items), dtype=bool)
        for t, members in enumerate(rows):
            for i in members:
                if not 1 <= i <= n_items:
                    raise ValueError(f"item {i} outside 1..{n_items}")
                bits[t, i - 1] = True
        return cls(bits)

    @classmethod
    def identity(cls, n: int) -> "TestMatrix":
        return cls(np.eye(n, dtype=bool))

    def __eq__(self, other):
        if not isinstance(other, TestMatrix):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self):
        return f"TestMatrix(n_tests={self.n_tests}, n_items={self.n_items})"


@dataclass(frozen=True)
class DesignParams:
    n_items: int
    n_tests: int
    inclusion_prob: float
    seed: int = 0

    def __post_init__(self):
        if self.n_items < 1:
            raise ValueError("n_items must be positive")
        if self.n_tests < 0:
            raise ValueError("n_tests must be non-negative")
        if not 0.0 <= self.inclusion_prob <= 1.0:
            raise ValueError(f"inclusion_prob must lie in [0, 1], got {self.inclusion_prob}")


def generate_bernoulli_design(params: DesignParams) -> TestMatrix:
    """Draw a Bernoulli(p) design from a PCG64 stream seeded by ``params.seed``.

    Cells are drawn in row-major order (test by test), so ``(seed, N, T, p)``
    determines the matrix bit for bit.
    """
    rng = np.random.Generator(np.random.PCG64(params.seed))
    u = rng.random((params.n_tests, params.n_items))
    return TestMatrix(u < params.inclusion_prob)


def _item_indices(defectives: Iterable[int], n_items: int) -> np.ndarray:
    idx = np.fromiter((int(i) for i in defectives), dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > n_items):
        bad = idx[(idx < 1) | (idx > n_items)][0]
        raise ValueError(f"item {bad} outside 1..{n_items}")
    return idx - 1


def indicator(items: Iterable[int], n_items: int) -> np.ndarray:
    mask = np.zeros(n_items, dtype=bool)
    mask[_item_indices(items, n_items)] = True
    return mask


def to_item_set(mask: np.ndarray) -> ItemSet:
    return ItemSet(int(j) + 1 for j in np.flatnonzero(mask))


def compute_outcomes(X: TestMatrix, defectives: Iterable[int]) -> np.ndarray:
    """Noiseless outcomes: test t is positive iff it contains a defective."""
    idx = _item_indices(defectives, X.n_items)
    y = X.bits[:, idx].any(axis=1)
    y.setflags(write=False)
    return y


def _check_outcomes(X: TestMatrix, y) -> np.ndarray:
    y = np.asarray(y, dtype=bool)
    if y.shape != (X.n_tests,):
        raise ValueError(f"outcome vector has shape {y.shape}, expected ({X.n_tests},)")
    return y


def is_satisfying(X: TestMatrix, y, candidate: Iterable[int]) -> bool:
    y = _check_outcomes(X, y)
    return bool(np.array_equal(compute_outcomes(X, candidate), y))


def unexplained_tests(X: TestMatrix, y, estimate: Iterable[int]) -> frozenset:
    """1-based positive tests that contain no member of ``estimate``."""
    y = _check_outcomes(X, y)
    covered = X.bits[:, _item_indices(estimate, X.n_items)].any(axis=1)
    return frozenset(int(t) + 1 for t in np.flatnonzero(y & ~covered))


def _subset_count(n: int, k: int) -> int:
    return sum(math.comb(n, j) for j in range(min(k, n) + 1))


def _guard(n: int, k: int, cap: int) -> None:
    if k < 0:
        raise ValueError("k must be non-negative")
    count = _subset_count(n, k)
    if count > cap:
        raise DesignTooLargeError(
            f"{count} subsets of size <= {k} among {n} items exceeds the cap of {cap}"
        )


def is_k_disjunct(X: TestMatrix, k: int, cap: int = DEFAULT_SUBSET_CAP) -> bool:
    """Exhaustive k-disjunctness check over every subset of size at most k."""
    n = X.n_items
    _guard(n, k, cap)
    cols = X.column_masks()
    for size in range(min(k, n) + 1):
        for subset in itertools.combinations(range(n), size):
            union = 0
            for j in subset:
                union |= cols[j]
            members = set(subset)
            for i in range(n):
                if i not in members and not cols[i] & ~union:
                    return False
    return True


def is_k_separable(X: TestMatrix, k: int, cap: int = DEFAULT_SUBSET_CAP) -> bool:
    """Exhaustive k-separability check: distinct subsets of size <= k have distinct ORs."""
    n = X.n_items
    _guard(n, k, cap)
    cols = X.column_masks()
    seen = set()
    for size in range(min(k, n) + 1):
        for subset in itertools.combinations(range(n), size):
            union = 0
            for j in subset:
                union |= cols[j]
            if union in seen:
                return False
            seen.add(union)
    return True


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Instance:
    matrix: TestMatrix
    outcomes: Optional[np.ndarray] = None
    defectives: Optional[ItemSet] = None

    def resolved_outcomes(self) -> np.ndarray:
        """The stored outcomes, or those implied by the stored defective set."""
        if self.outcomes is not None:
            return self.outcomes
        if self.defectives is not None:
            return compute_outcomes(self.matrix, self.defectives)
        raise InstanceFormatError("instance has neither outcomes nor a defective set")


def _parse_bits(text: str, length: int, what: str) -> list[bool]:
    if len(text) != length or set(text) - {"0", "1"}:
        raise InstanceFormatError(f"{what}: expected {length} characters in {{0,1}}, got {text!r}")
    return [c == "1" for c in text]


def parse_instance(text: str) -> Instance:
    """Parse the plain-text instance format.

    Line 1 is ``N T``; the next T lines hold N characters each (test t);
    then an optional ``y <bits>`` line and an optional ``K <items>`` line.
    Items in the ``K`` line are 1-based.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InstanceFormatError("empty instance")
    header = lines[0].split()
    if len(header) != 2:
        raise InstanceFormatError(f"header must be 'N T', got {lines[0]!r}")
    try:
        n, t = int(header[0]), int(header[1])
    except ValueError as exc:
        raise InstanceFormatError(f"bad header {lines[0]!r}") from exc
    if n < 1 or t < 0:
        raise InstanceFormatError("need N >= 1 and T >= 0")
    if len(lines) < 1 + t:
        raise InstanceFormatError(f"expected {t} matrix rows, found {len(lines) - 1}")
    rows = [_parse_bits(lines[1 + r], n, f"row {r + 1}") for r in range(t)]
    bits = np.array(rows, dtype=bool).reshape(t, n)
    matrix = TestMatrix(bits)

    outcomes = defectives = None
    for ln in lines[1 + t:]:
        tag, _, rest = ln.partition(" ")
        rest = rest.strip()
        if tag == "y" and outcomes is None:
            outcomes = np.array(_parse_bits(rest, t, "outcome line"), dtype=bool)
            outcomes.setflags(write=False)
        elif tag == "K" and defectives is None:
            try:
                items = [int(tok) for tok in rest.split()]
            except ValueError as exc:
                raise InstanceFormatError(f"bad defective line {ln!r}") from exc
            bad = [i for i in items if not 1 <= i <= n]
            if bad:
                raise InstanceFormatError(f"defective item {bad[0]} outside 1..{n}")
            defectives = ItemSet(items)
        else:
            raise InstanceFormatError(f"unexpected line {ln!r}")
    return Instance(matrix, outcomes, defectives)


def read_instance(path) -> Instance:
    return parse_instance(Path(path).read_text())


def format_instance(instance: Instance) -> str:
    X = instance.matrix
    out = [f"{X.n_items} {X.n_tests}"]
    out += ["".join("1" if b else "0" for b in row) for row in X.bits.tolist()]
    if instance.outcomes is not None:
        out.append("y " + "".join("1" if b else "0" for b in np.asarray(instance.outcomes).tolist()))
    if instance.defectives is not None:
        out.append("K " + " ".join(str(i) for i in sorted(instance.defectives)))
    return "\n".join(out) + "\n"


def write_instance(path, instance: Instance) -> None:
    Path(path).write_text(format_instance(instance))
