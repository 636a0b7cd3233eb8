"""Encoder and decoders for the two-matrix threshold testing scheme.

A scheme couples a locator matrix G (h x n) with a solver matrix M
(k x n, certified (d+1)-disjunct).  The full test matrix T interleaves,
for each row i of G, one block of 2k+1 pools:

    [ G_i ;  M masked by G_i ;  complement(M) masked by G_i ]

so T has (2k+1) h rows.  Under threshold-u semantics the block for row i
observes the restriction of the item vector to supp(G_i).  When that
restriction has weight exactly u, the three recovery rules turn the pair
of threshold outcome blocks into the boolean-OR outcome of M, which the
cover decoder inverts exactly.  Blocks whose restriction has a different
weight are screened out by the size and OR-consistency checks; the
multiset variant keeps per-item occurrence counts so that up to e
erroneous outcomes can be outvoted (an error corrupts at most one block,
so a frequency threshold of e+1 separates true items from fabricated
ones).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bitmat import (
    BitMatrix,
    BitVector,
    DefectiveSet,
    load_matrix,
    serialize_matrix,
)
from .errors import CoverOverflowError, DimensionError, ParameterError, ParseError
from .semantics import SchemeParams


class Scheme:
    """Immutable bundle of (params, G, M, complement(M), T)."""

    __slots__ = ("params", "g", "m", "m_bar", "t", "_g_f", "_m_f", "_mbar_f")

    def __init__(self, params: SchemeParams, g: BitMatrix, m: BitMatrix):
        if g.cols != m.cols:
            raise DimensionError(f"column mismatch: G has {g.cols}, M has {m.cols}")
        if g.cols != params.n:
            raise DimensionError(f"params.n={params.n} but matrices have {g.cols} columns")
        ga, ma = g.to_array(), m.to_array()
        mbar = 1 - ma
        blocks = []
        for i in range(g.rows):
            mask = ga[i]
            blocks.append(mask[None, :])
            blocks.append(ma & mask)
            blocks.append(mbar & mask)
        for name, value in (
            ("params", params),
            ("g", g),
            ("m", m),
            ("m_bar", BitMatrix(mbar)),
            ("t", BitMatrix(np.vstack(blocks))),
            ("_g_f", ga.astype(np.float32)),
            ("_m_f", ma.astype(np.float32)),
            ("_mbar_f", mbar.astype(np.float32)),
        ):
            object.__setattr__(self, name, value)

    def __setattr__(self, name, value):
        raise AttributeError("Scheme is immutable")

    @property
    def h(self) -> int:
        return self.g.rows

    @property
    def k(self) -> int:
        return self.m.rows

    @property
    def tests(self) -> int:
        return (2 * self.k + 1) * self.h


def build_scheme(g: BitMatrix, m: BitMatrix, params: SchemeParams) -> Scheme:
    return Scheme(params, g, m)


@dataclass(frozen=True)
class BlockOutcome:
    """Outcomes of one block: the locator bit and the two k-bit halves."""

    y: int
    y_block: BitVector
    y_bar_block: BitVector


def encode(scheme: Scheme, x: BitVector) -> list[BlockOutcome]:
    """Run all tests of the scheme against an item vector, blockwise.

    Equivalent to applying T row by row at threshold u, just grouped per
    locator row (and much faster, since the block structure lets the
    intersection counts be computed as two small matrix products).
    """
    if len(x) != scheme.params.n:
        raise DimensionError(f"item vector has length {len(x)}, scheme needs {scheme.params.n}")
    u = scheme.params.u
    xf = x.to_array().astype(np.float32)
    g_counts = scheme._g_f @ xf
    counts_m = (scheme._m_f * xf) @ scheme._g_f.T  # (k, h)
    counts_mbar = (scheme._mbar_f * xf) @ scheme._g_f.T
    outcomes = []
    for i in range(scheme.h):
        outcomes.append(
            BlockOutcome(
                int(g_counts[i] >= u),
                BitVector((counts_m[:, i] >= u).astype(np.uint8)),
                BitVector((counts_mbar[:, i] >= u).astype(np.uint8)),
            )
        )
    return outcomes


def flatten_outcomes(outcomes: list[BlockOutcome]) -> BitVector:
    """Concatenate blocks as [y_i, y-block, ybar-block] per locator row."""
    parts = []
    for block in outcomes:
        parts.append(np.array([block.y], dtype=np.uint8))
        parts.append(block.y_block.to_array())
        parts.append(block.y_bar_block.to_array())
    return BitVector(np.concatenate(parts))


def split_outcome(flat: BitVector, h: int, k: int) -> list[BlockOutcome]:
    """Inverse of flatten_outcomes for an (2k+1)h-bit vector."""
    stride = 2 * k + 1
    if len(flat) != stride * h:
        raise DimensionError(f"outcome has {len(flat)} bits, expected {stride * h}")
    a = flat.to_array()
    out = []
    for i in range(h):
        base = i * stride
        out.append(
            BlockOutcome(
                int(a[base]),
                BitVector(a[base + 1 : base + 1 + k]),
                BitVector(a[base + 1 + k : base + stride]),
            )
        )
    return out


def recover_yprime(block: BlockOutcome) -> BitVector:
    """Recover the boolean-OR outcome of M from a block's two halves.

    Per position: a positive threshold outcome stays positive; a negative
    one is negative only when the complement half is positive, because
    with exactly u defectives in the block both halves can only be
    negative when the defectives straddle the pool and its complement.
    Equivalently y' = y OR NOT ybar.  The identity y' = M (OR) x holds
    precisely when the block's restricted item vector has weight u.
    """
    yb = block.y_block.to_array()
    ybar = block.y_bar_block.to_array()
    if yb.size != ybar.size:
        raise DimensionError("block halves have different lengths")
    return BitVector(yb | (1 - ybar))


def cover_decode(m: BitMatrix, yprime: BitVector, cap: int | None = None) -> DefectiveSet:
    """Classic OR-semantics decoder: keep the columns whose every pool is
    positive.  Exact for |supp(x)| up to the disjunctness order of m.
    Raises CoverOverflowError when more than `cap` columns survive."""
    if m.rows != len(yprime):
        raise DimensionError(f"matrix has {m.rows} rows, outcome has {len(yprime)}")
    negative = (1 - yprime.to_array()).astype(np.int64)
    hits = negative @ m.to_array()
    candidates = np.flatnonzero(hits == 0)
    if cap is not None and candidates.size > cap:
        raise CoverOverflowError(int(candidates.size), cap)
    return DefectiveSet(candidates.tolist())


@dataclass(frozen=True)
class BlockTrace:
    block: int
    positive: bool
    accepted: bool
    reason: str  # "negative" | "accepted" | "overflow" | "size" | "or-mismatch"
    items: tuple[int, ...] | None = None


@dataclass(frozen=True)
class CandidateMultiset:
    """Occurrence counts of candidate defectives across accepted blocks."""

    counts: dict[int, int]

    def total(self) -> int:
        return sum(self.counts.values())

    def support(self) -> DefectiveSet:
        return DefectiveSet(self.counts.keys())

    def at_least(self, threshold: int) -> DefectiveSet:
        return DefectiveSet(j for j, c in self.counts.items() if c >= threshold)


@dataclass(frozen=True)
class DecodeReport:
    defectives: DefectiveSet
    multiset: CandidateMultiset
    traces: tuple[BlockTrace, ...]
    status: str  # "ok" | "no-positive-tests" | "all-blocks-rejected"


def decode_blocks(scheme: Scheme, outcomes: list[BlockOutcome]) -> DecodeReport:
    """Run the per-block decoding loop and keep a full audit trace.

    For each positive locator row: recover the OR outcome, cover-decode
    it (capped at d+1 candidates), and accept the candidate set only if
    it has exactly u items whose pooled columns reproduce the recovered
    outcome.  Accepted sets accumulate into both a plain union and a
    multiset of occurrence counts.
    """
    if len(outcomes) != scheme.h:
        raise DimensionError(f"got {len(outcomes)} blocks, scheme has {scheme.h}")
    u = scheme.params.u
    cap = scheme.params.d + 1
    k = scheme.k
    ma = scheme.m.to_array()

    y_scalars = np.array([b.y for b in outcomes], dtype=np.uint8)
    yb = np.stack([b.y_block.to_array() for b in outcomes])
    ybar = np.stack([b.y_bar_block.to_array() for b in outcomes])
    if yb.shape[1] != k:
        raise DimensionError(f"block length {yb.shape[1]} does not match k={k}")
    yprime = yb | (1 - ybar)
    # hits[i, j] = number of M-rows containing j whose recovered outcome is 0;
    # column j survives block i's cover decode iff hits[i, j] == 0.
    hits = (1 - yprime).astype(np.float32) @ scheme._m_f

    traces = []
    counts: Counter[int] = Counter()
    for i in range(scheme.h):
        if not y_scalars[i]:
            traces.append(BlockTrace(i, False, False, "negative"))
            continue
        candidates = np.flatnonzero(hits[i] == 0)
        if candidates.size > cap:
            traces.append(BlockTrace(i, True, False, "overflow"))
            continue
        if candidates.size != u:
            traces.append(BlockTrace(i, True, False, "size"))
            continue
        if not np.array_equal(ma[:, candidates].max(axis=1), yprime[i]):
            traces.append(BlockTrace(i, True, False, "or-mismatch"))
            continue
        items = tuple(int(j) for j in candidates)
        counts.update(items)
        traces.append(BlockTrace(i, True, True, "accepted", items))

    if any(t.accepted for t in traces):
        status = "ok"
    elif not y_scalars.any():
        status = "no-positive-tests"
    else:
        status = "all-blocks-rejected"
    multiset = CandidateMultiset(dict(sorted(counts.items())))
    return DecodeReport(multiset.support(), multiset, tuple(traces), status)


def find_defectives(scheme: Scheme, outcomes: list[BlockOutcome]) -> DefectiveSet:
    """Union of the accepted per-block candidate sets (no error tolerance)."""
    return decode_blocks(scheme, outcomes).defectives


def find_defectives_multiset(scheme: Scheme, outcomes: list[BlockOutcome]) -> CandidateMultiset:
    """Accepted candidate sets with multiplicity; total size is at most u*h."""
    return decode_blocks(scheme, outcomes).multiset


def dec_natgt(scheme: Scheme, outcomes: list[BlockOutcome], e: int) -> DefectiveSet:
    """Error-tolerant decoding: keep items seen in at least e+1 accepted
    blocks.  With the locator matrix good at budget 2e and at most e
    flipped outcomes, true defectives clear the bar and fabricated ones
    cannot."""
    if e < 0:
        raise ParameterError(f"error budget must be nonnegative, got {e}")
    return find_defectives_multiset(scheme, outcomes).at_least(e + 1)


def adversarial_flip_positions(scheme: Scheme, x: BitVector, e: int) -> tuple[int, ...]:
    """Pick e flip positions that hurt the decoder most: kill the locator
    bits of qualifying blocks for the defective with the fewest of them."""
    if e == 0:
        return ()
    stride = 2 * scheme.k + 1
    ga = scheme.g.to_array()
    xa = x.to_array().astype(np.int64)
    qualifying = ga @ xa == scheme.params.u
    support = np.flatnonzero(xa)
    if support.size == 0 or not qualifying.any():
        return tuple(i * stride for i in range(min(e, scheme.h)))
    per_item = ga[qualifying][:, support].sum(axis=0)
    target = int(support[np.argmin(per_item)])
    blocks = np.flatnonzero(qualifying & (ga[:, target] == 1)).tolist()
    for i in np.flatnonzero(qualifying).tolist():
        if len(blocks) >= e:
            break
        if i not in blocks:
            blocks.append(i)
    for i in range(scheme.h):
        if len(blocks) >= e:
            break
        if i not in blocks:
            blocks.append(i)
    return tuple(sorted(i * stride for i in blocks[:e]))


# --- scheme bundles --------------------------------------------------------


def _header_params(params: SchemeParams, seed: int, c: float, c_g: float) -> dict:
    return {"d": params.d, "u": params.u, "e": params.e, "seed": seed, "c": c, "c_g": c_g}


def save_bundle(
    directory: str | Path,
    scheme: Scheme,
    seed: int,
    c: float,
    c_g: float,
    m_certificate: dict,
    g_validation: dict,
) -> None:
    """Write G.mat / M.mat / T.mat plus a scheme.json manifest.

    Output is byte-reproducible: params serialize with sorted keys and
    nothing time- or host-dependent is recorded.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    header = _header_params(scheme.params, seed, c, c_g)
    (directory / "G.mat").write_bytes(serialize_matrix(scheme.g, "good", header))
    (directory / "M.mat").write_bytes(serialize_matrix(scheme.m, "disjunct", header))
    (directory / "T.mat").write_bytes(serialize_matrix(scheme.t, "final", header))
    manifest = {
        "format": "tgt-scheme-v1",
        "n": scheme.params.n,
        "d": scheme.params.d,
        "u": scheme.params.u,
        "e": scheme.params.e,
        "p": scheme.params.p,
        "c": c,
        "c_g": c_g,
        "seed": seed,
        "h": scheme.h,
        "k": scheme.k,
        "t": scheme.tests,
        "m_certificate": m_certificate,
        "g_validation": g_validation,
    }
    (directory / "scheme.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    )


def load_bundle(directory: str | Path) -> tuple[Scheme, dict]:
    """Rebuild a scheme from a bundle directory, checking T for integrity."""
    directory = Path(directory)
    try:
        manifest = json.loads((directory / "scheme.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read scheme manifest in {directory}: {exc}") from exc
    if manifest.get("format") != "tgt-scheme-v1":
        raise ParseError(f"unknown scheme format {manifest.get('format')!r}")
    params = SchemeParams(
        n=manifest["n"], d=manifest["d"], u=manifest["u"],
        e=manifest["e"], p=manifest["p"],
    )
    g, kind_g, _ = load_matrix((directory / "G.mat").read_bytes())
    m, kind_m, _ = load_matrix((directory / "M.mat").read_bytes())
    if kind_g != "good" or kind_m != "disjunct":
        raise ParseError(f"unexpected matrix kinds {kind_g!r}/{kind_m!r} in bundle")
    scheme = Scheme(params, g, m)
    t_stored, _, _ = load_matrix((directory / "T.mat").read_bytes())
    if t_stored != scheme.t:
        raise ParseError("stored final matrix does not match G and M")
    return scheme, manifest
