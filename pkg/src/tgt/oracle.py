"""Brute-force ground truth for the decoders.

The oracle enumerates every candidate defective set up to size d,
simulates its outcome directly from the test matrix, and keeps the
candidates within a Hamming budget of the observed outcome.  It shares no
logic with the block decoder on purpose: its only job is to be obviously
correct at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bitmat import BitMatrix, BitVector, DefectiveSet
from .errors import BudgetError, DimensionError, ParameterError

DEFAULT_ENUM_LIMIT = 2_000_000
_CHUNK = 1024


@dataclass(frozen=True)
class ConsistencySet:
    """Candidate sets whose simulated outcome is within the budget."""

    candidates: tuple[DefectiveSet, ...]
    mismatch_budget: int

    def __len__(self) -> int:
        return len(self.candidates)

    def __contains__(self, dset: DefectiveSet) -> bool:
        return dset in self.candidates

    def is_singleton(self) -> bool:
        return len(self.candidates) == 1


def brute_force_decode(
    t: BitMatrix,
    y: BitVector,
    d: int,
    u: int,
    budget: int = 0,
    enum_limit: int | None = None,
) -> ConsistencySet:
    """Enumerate all sets of up to d items consistent with the outcome.

    Candidates are visited by cardinality, then lexicographically by
    sorted index tuple, so candidate order (and count) is exact and
    reproducible.
    """
    if t.rows != len(y):
        raise DimensionError(f"matrix has {t.rows} rows, outcome has {len(y)}")
    if u < 1:
        raise ParameterError(f"threshold must be >= 1, got {u}")
    if budget < 0:
        raise ParameterError(f"mismatch budget must be nonnegative, got {budget}")
    n = t.cols
    if d < 0 or d > n:
        raise ParameterError(f"need 0 <= d <= n, got d={d}, n={n}")
    total = sum(math.comb(n, s) for s in range(d + 1))
    limit = enum_limit if enum_limit is not None else DEFAULT_ENUM_LIMIT
    if total > limit:
        raise BudgetError(f"enumeration needs {total} candidates, limit is {limit}")

    tf = t.to_array().astype(np.float32)
    ya = y.to_array()
    kept: list[DefectiveSet] = []

    def flush(batch: list[tuple[int, ...]]) -> None:
        x = np.zeros((n, len(batch)), dtype=np.float32)
        for col, subset in enumerate(batch):
            x[list(subset), col] = 1.0
        outcomes = (tf @ x) >= u
        dist = (outcomes != ya[:, None]).sum(axis=0)
        for col in np.flatnonzero(dist <= budget):
            kept.append(DefectiveSet(batch[col]))

    for size in range(d + 1):
        batch: list[tuple[int, ...]] = []
        for subset in combinations(range(n), size):
            batch.append(subset)
            if len(batch) == _CHUNK:
                flush(batch)
                batch = []
        if batch:
            flush(batch)
    return ConsistencySet(tuple(kept), budget)


@dataclass(frozen=True)
class CrossCheckReport:
    false_positives: tuple[int, ...]
    false_negatives: tuple[int, ...]
    exact: bool


def cross_check(decoded: DefectiveSet, truth: DefectiveSet) -> CrossCheckReport:
    """Compare a decoded set against ground truth."""
    dec = set(decoded.indices)
    tru = set(truth.indices)
    fp = tuple(sorted(dec - tru))
    fn = tuple(sorted(tru - dec))
    return CrossCheckReport(fp, fn, not fp and not fn)
