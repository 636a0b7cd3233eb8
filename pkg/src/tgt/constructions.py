"""Builders and verifiers for the combinatorial objects the decoders need.

Three properties matter here:

* d-disjunct: for every column j and every d other columns, some row
  contains j and none of the others.  Guarantees exact OR-decoding of up
  to d defectives via the cover decoder.
* threshold (d, u; e)-disjunct: for every critical set S (u <= |S| <= d),
  disjoint zero set Z (|Z| <= |S|) and distinguished j in S, strictly more
  than e rows hit S in exactly u columns, miss Z entirely, and contain j.
* goodness for a fixed defective set D at budget e: some rows each contain
  exactly u defectives, together they cover D, and every defective lies in
  more than e of them.

The universal properties are exponential to check, so construction is
randomized and certified per instance: disjunctness by (budgeted)
exhaustive or sampled enumeration, goodness by sampling defective sets and
running the fixed-D checker.  Constructions are deterministic given a
seeded generator and fail hard after max_attempts rather than degrade.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bitmat import BitMatrix, DefectiveSet
from .errors import BudgetError, ConstructionError, ParameterError
from .semantics import SchemeParams

DEFAULT_BUDGET = 20_000_000
DEFAULT_SAMPLED_TRIALS = 20_000


def work_budget(budget: int | None = None) -> int:
    """Explicit budget, else the TGT_BUDGET environment cap, else default."""
    if budget is not None:
        return budget
    env = os.environ.get("TGT_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def disjunct_row_count(n: int, d: int, c: float = 3.0) -> int:
    """Rows for a random (d+1)-disjunct candidate on n columns."""
    return math.ceil(c * (d + 2) ** 2 * math.log(n))


def good_row_count(params: SchemeParams, c_g: float = 2.0) -> int:
    """Rows for a random locator-matrix candidate.

    Grows with d0^2 log(n/d0) and with the 1/(1-p)^2 margin; never fewer
    rows than layers.
    """
    d0 = params.d0
    h = math.ceil(c_g * d0 * d0 * math.log(params.n / d0) / (1.0 - params.p) ** 2)
    return max(h, params.d - params.u + 1)


@dataclass(frozen=True)
class DisjunctCertificate:
    d: int
    verified: bool
    method: str  # "exhaustive" | "sampled"
    trials: int
    witness: tuple[tuple[int, ...], int] | None = None  # (S1, isolated column)

    def to_json(self) -> dict:
        out = {
            "d": self.d,
            "verified": self.verified,
            "method": self.method,
            "trials": self.trials,
        }
        if self.witness is not None:
            s1, j = self.witness
            out["witness"] = {"s1": [i + 1 for i in s1], "column": j + 1}
        return out


@dataclass(frozen=True)
class GoodnessReport:
    defective_set: DefectiveSet
    u: int
    e: int
    qualifying_rows: tuple[int, ...]
    per_item_counts: dict[int, int]
    covers_all: bool
    is_good: bool


@dataclass(frozen=True)
class CriticalZeroPair:
    critical: frozenset[int]
    zero: frozenset[int]
    distinguished: int | None = None


@dataclass(frozen=True)
class ThresholdDisjunctReport:
    d: int
    u: int
    e: int
    passed: bool
    min_count: int
    witness: tuple[tuple[int, ...], tuple[int, ...], int] | None
    triples_checked: int


def _exhaustive_cost(n: int, d: int) -> int:
    return math.comb(n, d) * n


def verify_disjunct(
    m: BitMatrix,
    d: int,
    mode: str = "exhaustive",
    trials: int = DEFAULT_SAMPLED_TRIALS,
    rng: np.random.Generator | None = None,
    budget: int | None = None,
) -> DisjunctCertificate:
    """Check d-disjunctness by enumeration or uniform sampling.

    Exhaustive mode walks every d-subset S1 once and checks that every
    column outside S1 is isolated by some row that misses S1 entirely.
    Sampled mode draws (S1, j) pairs uniformly; it can only ever certify
    "no violation found in `trials` draws".
    """
    n = m.cols
    if d < 1 or d >= n:
        raise ParameterError(f"need 1 <= d < cols, got d={d}, cols={n}")
    a = m.to_array()

    if mode == "exhaustive":
        cost = _exhaustive_cost(n, d)
        cap = work_budget(budget)
        if cost > cap:
            raise BudgetError(
                f"exhaustive check needs ~{cost} steps, budget is {cap}; "
                "switch to sampled mode"
            )
        checked = 0
        for s1 in combinations(range(n), d):
            zero_rows = ~a[:, s1].any(axis=1)
            isolated = a[zero_rows].any(axis=0) if zero_rows.any() else np.zeros(n, bool)
            isolated[list(s1)] = True
            checked += n - d
            if not isolated.all():
                j = int(np.flatnonzero(~isolated)[0])
                return DisjunctCertificate(d, False, "exhaustive", checked, (s1, j))
        return DisjunctCertificate(d, True, "exhaustive", checked)

    if mode == "sampled":
        gen = rng if rng is not None else np.random.default_rng(0)
        for t in range(trials):
            perm = gen.permutation(n)
            j = int(perm[0])
            s1 = tuple(sorted(int(i) for i in perm[1 : d + 1]))
            zero_rows = ~a[:, s1].any(axis=1)
            if not a[zero_rows, j].any():
                return DisjunctCertificate(d, False, "sampled", t + 1, (s1, j))
        return DisjunctCertificate(d, True, "sampled", trials)

    raise ParameterError(f"unknown mode {mode!r}")


def check_disjunct_slow(m: BitMatrix, d: int) -> bool:
    """Independent plain-loop reimplementation of the disjunct property.

    Kept deliberately dumb (sets and Python loops) so it shares no code
    with verify_disjunct; used to cross-check it in tests.
    """
    n = m.cols
    supports = [set(np.flatnonzero(m.to_array()[:, j]).tolist()) for j in range(n)]
    for s1 in combinations(range(n), d):
        union = set()
        for jj in s1:
            union |= supports[jj]
        for j in range(n):
            if j in s1:
                continue
            if not (supports[j] - union):
                return False
    return True


def construct_disjunct(
    n: int,
    d: int,
    rng: np.random.Generator,
    max_attempts: int = 50,
    c: float = 3.0,
    budget: int | None = None,
    sampled_trials: int = DEFAULT_SAMPLED_TRIALS,
) -> tuple[BitMatrix, DisjunctCertificate]:
    """Sample Bernoulli matrices until one verifies as (d+1)-disjunct.

    Entry density 1/(d+2) and ceil(c (d+2)^2 ln n) rows; verification is
    exhaustive when it fits the work budget, sampled otherwise.
    """
    if d < 1:
        raise ParameterError(f"need d >= 1, got {d}")
    if d + 1 >= n:
        raise ParameterError(f"need d+1 < n, got d={d}, n={n}")
    k = disjunct_row_count(n, d, c)
    density = 1.0 / (d + 2)
    order = d + 1
    mode = "exhaustive" if _exhaustive_cost(n, order) <= work_budget(budget) else "sampled"
    for _ in range(max_attempts):
        m = BitMatrix.random(rng, k, n, density)
        cert = verify_disjunct(m, order, mode=mode, trials=sampled_trials, rng=rng, budget=budget)
        if cert.verified:
            return m, cert
    raise ConstructionError(
        f"no ({order})-disjunct matrix found in {max_attempts} attempts "
        f"(n={n}, k={k}, density={density:.3f})",
        attempts=max_attempts,
    )


def verify_threshold_disjunct(
    g: BitMatrix,
    d: int,
    u: int,
    e: int,
    budget: int | None = None,
) -> ThresholdDisjunctReport:
    """Exhaustively check the threshold-disjunct property at desk scale.

    Enumerates every (S, Z, j) triple; only feasible for small n, so the
    projected triple count is charged against the work budget up front.
    """
    n = g.cols
    if not (1 <= u <= d < n):
        raise ParameterError(f"need 1 <= u <= d < n, got u={u}, d={d}, n={n}")
    total = 0
    for s_size in range(u, d + 1):
        z_choices = sum(
            math.comb(n - s_size, z) for z in range(0, min(s_size, n - s_size) + 1)
        )
        total += math.comb(n, s_size) * z_choices * s_size
    cap = work_budget(budget)
    if total > cap:
        raise BudgetError(f"threshold check needs ~{total} triples, budget is {cap}")

    a = g.to_array()
    min_count: int | None = None
    witness = None
    passed = True
    checked = 0
    for s_size in range(u, d + 1):
        for s in combinations(range(n), s_size):
            s_cols = a[:, s]
            weight_u = s_cols.sum(axis=1) == u
            rest = [j for j in range(n) if j not in s]
            for z_size in range(0, min(s_size, n - s_size) + 1):
                for z in combinations(rest, z_size):
                    ok = weight_u & ~a[:, z].any(axis=1) if z_size else weight_u
                    counts = s_cols[ok].sum(axis=0)
                    checked += s_size
                    low = int(counts.min()) if counts.size else 0
                    if min_count is None or low < min_count:
                        min_count = low
                        j = s[int(np.argmin(counts))]
                        witness = (s, z, j)
                    if low <= e:
                        passed = False
    return ThresholdDisjunctReport(
        d, u, e, passed, min_count or 0, None if passed else witness, checked
    )


def is_good_for(g: BitMatrix, dset: DefectiveSet, u: int, e: int) -> GoodnessReport:
    """Fixed-D goodness check.

    Qualifying rows are those meeting D in exactly u items.  The matrix is
    good for D when the qualifying rows cover D and every item of D lies
    in strictly more than e of them.  (Coverage follows from the counts
    whenever e >= 0, but is reported separately.)
    """
    items = np.asarray(dset.indices, dtype=np.int64)
    if items.size and items.max() >= g.cols:
        raise ParameterError("defective index out of range")
    if items.size == 0:
        return GoodnessReport(dset, u, e, (), {}, True, True)
    sub = g.to_array()[:, items]
    qualifying = np.flatnonzero(sub.sum(axis=1) == u)
    counts = sub[qualifying].sum(axis=0) if qualifying.size else np.zeros(items.size, np.int64)
    per_item = {int(j): int(c) for j, c in zip(items, counts)}
    covers = bool((counts >= 1).all())
    good = bool((counts > e).all())
    return GoodnessReport(dset, u, e, tuple(int(r) for r in qualifying), per_item, covers, good)


def _sample_defective_set(rng: np.random.Generator, n: int, size: int) -> DefectiveSet:
    return DefectiveSet(rng.choice(n, size=size, replace=False).tolist())


def validate_good(
    g: BitMatrix,
    params: SchemeParams,
    rng: np.random.Generator,
    sets_per_cardinality: int,
    budget_e: int,
) -> dict:
    """Sample defective sets of every cardinality in [u, d] and run the
    fixed-D checker at the given budget.  Returns a summary dict; the
    "failure" entry holds the first failing (cardinality, items) pair."""
    for size in range(params.u, params.d + 1):
        for _ in range(sets_per_cardinality):
            dset = _sample_defective_set(rng, params.n, size)
            report = is_good_for(g, dset, params.u, budget_e)
            if not report.is_good:
                return {
                    "passed": False,
                    "sets_per_cardinality": sets_per_cardinality,
                    "budget": budget_e,
                    "failure": {"cardinality": size, "items": dset.to_one_based()},
                }
    return {
        "passed": True,
        "sets_per_cardinality": sets_per_cardinality,
        "budget": budget_e,
        "failure": None,
    }


def construct_good(
    params: SchemeParams,
    rng: np.random.Generator,
    max_attempts: int = 50,
    validation_sets: int = 200,
    c_g: float = 2.0,
) -> BitMatrix:
    """Build a locator matrix validated at budget 2e on sampled sets.

    Rows come in one layer per target cardinality s in {u..d}; a layer-s
    entry is 1 with probability u/s, so a layer-s row meets an s-sized
    defective set in exactly u items with constant probability.  Layers
    split the total row count as evenly as possible.  Every candidate is
    validated with `validation_sets` sampled defective sets per
    cardinality at budget 2e; the last failure is reported if all
    attempts are exhausted.
    """
    h = good_row_count(params, c_g)
    sizes = list(range(params.u, params.d + 1))
    per = h // len(sizes)
    extra = h % len(sizes)
    last_failure = None
    for _ in range(max_attempts):
        layers = []
        for idx, s in enumerate(sizes):
            rows = per + (1 if idx < extra else 0)
            if rows:
                layers.append(
                    (rng.random((rows, params.n)) < params.u / s).astype(np.uint8)
                )
        g = BitMatrix(np.vstack(layers))
        result = validate_good(g, params, rng, validation_sets, 2 * params.e)
        if result["passed"]:
            return g
        last_failure = result["failure"]
    raise ConstructionError(
        f"no good matrix found in {max_attempts} attempts "
        f"(n={params.n}, d={params.d}, u={params.u}, e={params.e}, "
        f"p={params.p}, h={h}); last failure: {last_failure}",
        attempts=max_attempts,
        witness=last_failure,
    )


def critical_zero_cover(
    dset: DefectiveSet, n: int, d: int, u: int
) -> list[CriticalZeroPair]:
    """Split a defective set into critical/zero pairs whose criticals
    cover it.

    Two regimes.  For d <= 2u the set is covered by two u-subsets, each
    paired with the remainder as its zero set.  For d >= 2u+1 each
    defective gets its own pair: a critical set of size d-u containing it
    (padded with the lowest-indexed non-defectives when D is small) and a
    zero set of size u+1 containing every defective left outside.
    """
    items = list(dset.indices)
    kappa = len(items)
    if kappa < u:
        raise ParameterError(f"need at least u={u} defectives, got {kappa}")
    if kappa > d:
        raise ParameterError(f"defective set larger than d={d}")
    if not (1 <= u <= d < n):
        raise ParameterError(f"need 1 <= u <= d < n, got u={u}, d={d}, n={n}")

    if d <= 2 * u:
        d1 = frozenset(items[:u])
        d2 = frozenset(items[-u:])
        full = set(items)
        return [
            CriticalZeroPair(d1, frozenset(full - d1)),
            CriticalZeroPair(d2, frozenset(full - d2)),
        ]

    # d >= 2u + 1: per-item pairs of size d-u with zero sets of size u+1.
    s_size = d - u
    z_size = u + 1
    if n < s_size + z_size:
        raise ParameterError("not enough items to build zero sets")
    dset_all = set(items)
    non_defective = [j for j in range(n) if j not in dset_all]
    pairs = []
    for j in items:
        if kappa <= s_size:
            critical = set(items)
            critical.update(non_defective[: s_size - kappa])
        else:
            critical = {j}
            for other in items:
                if len(critical) == s_size:
                    break
                critical.add(other)
        zero = set(items) - critical
        for cand in range(n):
            if len(zero) == z_size:
                break
            if cand not in critical and cand not in zero:
                zero.add(cand)
        pairs.append(CriticalZeroPair(frozenset(critical), frozenset(zero), j))
    return pairs
