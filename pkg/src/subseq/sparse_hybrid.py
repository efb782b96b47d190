"""Hybrid LCS: match-indexed sparse blocks, tabulated dense blocks.

The grid is cut into b x b blocks and every match is bucketed into its
owning block up front. A block holding at most K matches is resolved by
a single lookup keyed on its border diffs plus the match coordinates:
the DP recurrence only ever asks "is this cell a match", so symbol
values are irrelevant once the match set is known, and one table serves
every input. Blocks with more than K matches fall back to a dense
strategy, either a plain fill or the stripe tabulation machinery run
over the block with symbols recoded against its stripe's row alphabet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .block_tabulation import (
    DEFAULT_KEY_BUDGET_BITS,
    WORD_BITS,
    _ceil_log2,
    _width,
    unpack_stripe_value,
)
from .errors import ParameterError
from .instrumentation import EngineStats
from .seq_core import MatchIndex, as_symbols, enumerate_block_matches

# Shared tables are kept for the life of the process, so their keys must
# stay small enough to leave the arrays resident; per-run stamped
# sub-tables may run a little larger.
_SPARSE_BITS_CAP = 24
_SUB_BITS_CAP = 26

DENSE_STRATEGIES = ("section3", "direct_dp")

# One lazily filled entry array per (b, K, diff_bits), shared across
# calls. Entries start at -1 and move to their final value exactly once;
# a duplicate concurrent fill writes the same value, so readers are safe.
_shared_tables: dict = {}


@dataclass(frozen=True)
class HybridParams:
    """Geometry of the hybrid engine.

    b is the block side and K the sparse/dense threshold: a block with
    more than K matches is dense. dense_strategy picks the dense path,
    "section3" (stripe tables over the block, the default) or
    "direct_dp" (plain fill). key_budget_bits bounds the packed key.
    """

    b: int
    K: int
    key_budget_bits: int = DEFAULT_KEY_BUDGET_BITS
    dense_strategy: str = "section3"

    def __post_init__(self):
        if self.b < 1:
            raise ParameterError("block side must be >= 1")
        if self.K < 1:
            raise ParameterError("match threshold must be >= 1")
        if self.key_budget_bits < 1:
            raise ParameterError("key budget must be >= 1")
        need = 2 * self.b + self.K * _ceil_log2(self.b * self.b)
        if need > self.key_budget_bits:
            raise ParameterError(
                f"sparse key needs {need} bits, budget is "
                f"{self.key_budget_bits}")
        if self.dense_strategy not in DENSE_STRATEGIES:
            raise ParameterError(
                f"unknown dense strategy {self.dense_strategy!r}")


def _sparse_geometry(params: HybridParams, diff_bits: int):
    """Field widths of the packed key: (count_bits, coord_bits, key_bits)."""
    count_bits = _width(params.K)
    coord_bits = _ceil_log2(params.b * params.b)
    key_bits = 2 * diff_bits * params.b + count_bits + params.K * coord_bits
    return count_bits, coord_bits, key_bits


@dataclass(frozen=True)
class SparseBlockKey:
    """Input half of one sparse-block transition.

    top_diffs run along A, left_diffs along B. match_coords pack
    (li-1)*b + (lj-1) for a match at block-local (li, lj), li along A
    and lj along B, strictly ascending; match_count is their number.
    Symbols never appear: the transition depends on the match set alone.
    """

    top_diffs: np.ndarray
    left_diffs: np.ndarray
    match_count: int
    match_coords: np.ndarray

    def __post_init__(self):
        top = np.ascontiguousarray(np.asarray(self.top_diffs, np.int64))
        left = np.ascontiguousarray(np.asarray(self.left_diffs, np.int64))
        coords = np.ascontiguousarray(np.asarray(self.match_coords, np.int64))
        object.__setattr__(self, "top_diffs", top)
        object.__setattr__(self, "left_diffs", left)
        object.__setattr__(self, "match_coords", coords)
        object.__setattr__(self, "match_count", int(self.match_count))
        if top.ndim != 1 or top.size < 1 or left.shape != top.shape:
            raise ParameterError("border diffs must be equal-length vectors")
        for arr in (top, left):
            if arr.size and (arr.min() < -1 or arr.max() > 1):
                raise ParameterError("border diffs must lie in {-1, 0, 1}")
        if coords.ndim != 1 or self.match_count != coords.size:
            raise ParameterError("match_count must equal len(match_coords)")
        cells = top.size * top.size
        if coords.size:
            if coords.min() < 0 or coords.max() >= cells:
                raise ParameterError("match coordinates fall outside the block")
            if not (np.diff(coords) > 0).all():
                raise ParameterError("match coordinates must ascend strictly")

    @property
    def b(self) -> int:
        return int(self.top_diffs.size)

    def pack(self, params: HybridParams, diff_bits: int = 1) -> int:
        """Pack into the integer key the tables are indexed by."""
        if self.b != params.b:
            raise ParameterError("key block side does not match params")
        if self.match_count > params.K:
            raise ParameterError("match count exceeds the sparse threshold")
        if diff_bits == 1 and (self.top_diffs.min(initial=0) < 0
                               or self.left_diffs.min(initial=0) < 0):
            raise ParameterError("subsequence keys use {0, 1} border diffs")
        count_bits, coord_bits, _ = _sparse_geometry(params, diff_bits)
        key = 0
        offset = 0 if diff_bits == 1 else 1
        for t, d in enumerate(self.top_diffs):
            key |= (int(d) + offset) << (diff_bits * t)
        for s, d in enumerate(self.left_diffs):
            key |= (int(d) + offset) << (diff_bits * (self.b + s))
        cbase = 2 * diff_bits * self.b
        key |= self.match_count << cbase
        pbase = cbase + count_bits
        for w, cell in enumerate(self.match_coords):
            key |= int(cell) << (pbase + w * coord_bits)
        return key

    @classmethod
    def unpack(cls, packed: int, params: HybridParams,
               diff_bits: int = 1) -> "SparseBlockKey":
        """Inverse of pack; rejects keys violating the invariants."""
        count_bits, coord_bits, key_bits = _sparse_geometry(params, diff_bits)
        if key_bits >= WORD_BITS:
            raise ParameterError("packed key exceeds the machine word")
        if packed < 0 or packed >> key_bits:
            raise ParameterError("packed key out of range")
        if _kernels.hyb_key_invalid(np.int64(packed), params.b, params.K,
                                    diff_bits, count_bits, coord_bits):
            raise ParameterError("packed key violates the key invariants")
        b = params.b
        offset = 0 if diff_bits == 1 else 1
        mask = (1 << diff_bits) - 1
        top = [((packed >> (diff_bits * t)) & mask) - offset
               for t in range(b)]
        left = [((packed >> (diff_bits * (b + s))) & mask) - offset
                for s in range(b)]
        cbase = 2 * diff_bits * b
        count = (packed >> cbase) & ((1 << count_bits) - 1)
        pbase = cbase + count_bits
        cmask = (1 << coord_bits) - 1
        coords = [(packed >> (pbase + w * coord_bits)) & cmask
                  for w in range(count)]
        return cls(np.array(top), np.array(left), count, np.array(coords))


@dataclass(frozen=True)
class BlockCensus:
    """Per-block match counts plus the dense fraction f_d."""

    counts: np.ndarray
    dense_fraction_fd: float

    def __post_init__(self):
        if not 0.0 <= self.dense_fraction_fd <= 1.0:
            raise ParameterError("dense fraction must lie in [0, 1]")
        if self.counts.size and int(self.counts.min()) < 0:
            raise ParameterError("match counts must be >= 0")


def classify_blocks(matches: MatchIndex, params: HybridParams) -> BlockCensus:
    """Label every block sparse (count <= K) or dense and compute f_d."""
    counts = matches.counts
    if counts.size == 0:
        return BlockCensus(counts, 0.0)
    dense = int(np.count_nonzero(counts > params.K))
    return BlockCensus(counts, dense / counts.size)


def sparse_block_transition(key: SparseBlockKey, params: HybridParams, *,
                            diff_bits: int = 1):
    """Bottom diffs, right diffs and corner delta of one sparse block.

    The output equals running the DP over the block under any symbol
    assignment realizing exactly the keyed match set.
    """
    packed = key.pack(params, diff_bits)
    count_bits, coord_bits, key_bits = _sparse_geometry(params, diff_bits)
    if key_bits >= WORD_BITS:
        raise ParameterError("packed key exceeds the machine word")
    b = params.b
    T = np.zeros((b + 1, b + 1), np.int64)
    val = _kernels.hyb_block_value(np.int64(packed), b, diff_bits,
                                   count_bits, coord_bits, T)
    return unpack_stripe_value(int(val), b, b, diff_bits)


@dataclass
class SparseLut:
    """Eagerly built transition table over every valid sparse key.

    entries is indexed by the packed key; slots whose key violates the
    invariants stay -1 (packed values are never negative).
    """

    entries: np.ndarray
    b: int
    K: int
    count_bits: int
    coord_bits: int
    diff_bits: int = 1
    key_bits: int = 0
    filled: int = 0

    def __post_init__(self):
        expect = (2 * self.diff_bits * self.b + self.count_bits
                  + self.K * self.coord_bits)
        if self.key_bits == 0:
            self.key_bits = expect
        if self.key_bits != expect:
            raise ParameterError("key_bits inconsistent with the geometry")
        if self.entries.shape[0] != 1 << self.key_bits:
            raise ParameterError("entry count must be 2**key_bits")
        if not 0 <= self.filled <= self.entries.shape[0]:
            raise ParameterError("filled count out of range")

    def entry(self, packed: int) -> int:
        if not 0 <= packed < self.entries.shape[0]:
            raise ParameterError("packed key out of range")
        return int(self.entries[packed])

    def lookup(self, key: SparseBlockKey):
        """Block output for one key: (bottom diffs, right diffs, delta)."""
        params = HybridParams(self.b, self.K, key_budget_bits=WORD_BITS)
        value = self.entry(key.pack(params, self.diff_bits))
        if value < 0:
            raise ParameterError("key violates the packing invariants")
        return unpack_stripe_value(value, self.b, self.b, self.diff_bits)


def build_sparse_lut(params: HybridParams, *,
                     diff_bits: int = 1) -> SparseLut:
    """Enumerate and fill every valid sparse key eagerly."""
    count_bits, coord_bits, key_bits = _sparse_geometry(params, diff_bits)
    cap = min(params.key_budget_bits, _SPARSE_BITS_CAP)
    if key_bits > cap:
        raise ParameterError(
            f"sparse key needs {key_bits} bits, budget allows {cap}")
    entries = np.full(1 << key_bits, -1, np.int64)
    T = np.zeros((params.b + 1, params.b + 1), np.int64)
    filled = int(_kernels.hyb_build_lut(params.b, params.K, diff_bits,
                                        count_bits, coord_bits, entries, T))
    return SparseLut(entries, params.b, params.K, count_bits, coord_bits,
                     diff_bits, key_bits, filled)


def default_hybrid_params(n: int, m: int | None = None,
                          key_budget_bits: int = DEFAULT_KEY_BUDGET_BITS, *,
                          diff_bits: int = 1,
                          dense_strategy: str = "section3") -> HybridParams:
    """Pick (b, K) for an n x m instance under the key budget.

    K tracks log2(n) / log2(log2(n)), at least 1; b is then the largest
    side whose packed key fits both the budget and the shared-table cap.
    """
    hi = max(int(n), int(n if m is None else m), 2)
    lg = math.log2(hi)
    lglg = max(math.log2(max(lg, 2.0)), 1.0)
    k = max(1, int(lg / lglg))
    cap = min(key_budget_bits, _SPARSE_BITS_CAP)
    best = 0
    for b in range(1, WORD_BITS // 2):
        need = 2 * b + k * _ceil_log2(b * b)
        actual = 2 * diff_bits * b + _width(k) + k * _ceil_log2(b * b)
        if need <= key_budget_bits and actual <= cap:
            best = b
    if best == 0:
        raise ParameterError("key budget too small for any block side")
    return HybridParams(best, k, key_budget_bits, dense_strategy)


def _shared_table(b: int, k: int, diff_bits: int, key_bits: int):
    """Fetch or create the lazily filled entry array for (b, K, mode)."""
    ident = (b, k, diff_bits)
    table = _shared_tables.get(ident)
    if table is None:
        table = np.full(1 << key_bits, -1, np.int64)
        _shared_tables[ident] = table
        return table, True
    return table, False


def _hybrid_core(xa: np.ndarray, xb: np.ndarray, params: HybridParams,
                 diff_bits: int, stats: EngineStats) -> int:
    """Shared engine: subsequence scoring (diff_bits=1) or distance (2)."""
    n, m = int(xa.size), int(xb.size)
    b, k = params.b, params.K
    count_bits, coord_bits, key_bits = _sparse_geometry(params, diff_bits)
    cap = min(params.key_budget_bits, _SPARSE_BITS_CAP)
    if key_bits > cap:
        raise ParameterError(
            f"sparse key needs {key_bits} bits, budget allows {cap}")
    base = 0 if diff_bits == 1 else m
    stats.cells = n * m
    stats.f_d = 0.0
    stats.extra["r"] = 0
    if diff_bits == 1:
        top = np.zeros(n, np.int8)
    else:
        top = np.ones(n, np.int8)
    if n == 0 or m == 0:
        return base + int(top.sum())

    matches = enumerate_block_matches(xa, xb, b, b, stored_cap=k)
    census = classify_blocks(matches, params)
    stats.f_d = census.dense_fraction_fd
    stats.extra["r"] = matches.total_matches
    nbi, mbj = n // b, m // b
    nbj = matches.grid_shape[1]

    table, created = _shared_table(b, k, diff_bits, key_bits)
    if created:
        stats.lut_allocations += 1
    stats.lut_capacity = int(table.shape[0])
    stats.aux_lut_bytes = int(table.nbytes)
    # per-run scratch so lut_entries counts the keys this instance needs,
    # not the fills left over after earlier runs warmed the shared table
    seen = np.zeros(table.shape[0], np.uint8)

    # dense sub-table: x1p-wide stripe keys over the block height, coded
    # against at most b distinct row symbols plus one absent sentinel;
    # width 1 always fits because the sparse key check above already
    # bounded diff_bits * b
    strategy = 1 if params.dense_strategy == "section3" else 0
    cbp = _width(b)
    x1p = 1
    sub_cap = min(params.key_budget_bits, _SUB_BITS_CAP)
    for x in range(2, b + 1):
        if diff_bits * (x + b) + x * cbp <= sub_cap:
            x1p = x
    dense_any = (nbi > 0 and mbj > 0
                 and bool((matches.counts[:nbi, :mbj] > k).any()))
    if strategy == 1 and dense_any:
        sub_bits = diff_bits * (x1p + b) + x1p * cbp
        sub_val = np.empty(1 << sub_bits, np.int64)
        sub_stamp = np.zeros(1 << sub_bits, np.int32)
        stats.lut_allocations += 1
        stats.lut_capacity += int(sub_val.shape[0])
        stats.aux_lut_bytes += int(sub_val.nbytes + sub_stamp.nbytes)
    else:
        sub_val = np.empty(1, np.int64)
        sub_stamp = np.zeros(1, np.int32)

    row0 = np.zeros(n + 1, np.int64)
    row1 = np.zeros(n + 1, np.int64)
    T = np.zeros((b + 1, b + 1), np.int64)
    Tsub = np.zeros((b + 1, x1p + 1), np.int64)
    bsort = np.zeros(b, np.int64)
    bcodes = np.zeros(b, np.int64)
    acodes = np.zeros(x1p, np.int64)
    stats.aux_border_bytes = int(top.nbytes + row0.nbytes + row1.nbytes
                                 + T.nbytes + Tsub.nbytes)

    sp, dn, gf, sf = _kernels.hyb_scan(
        xa, xb, b, k, diff_bits,
        np.ascontiguousarray(matches.counts.ravel()), matches.offsets,
        matches.coords, nbj, count_bits, coord_bits, table, seen, strategy,
        sub_val, sub_stamp, x1p, cbp,
        top, row0, row1, T, Tsub, bsort, bcodes, acodes)
    stats.sparse_lookups = int(sp)
    stats.dense_blocks = int(dn)
    stats.lut_entries = int(gf + sf)
    stats.blocks = -(-n // b) * (-(-m // b))
    stats.ragged_cells = mbj * b * (n % b) + (m % b) * n
    return base + int(top.sum())


def lcs_hybrid_stats(a, b, params: HybridParams | None = None, *,
                     key_budget_bits: int | None = None,
                     dense_strategy: str | None = None):
    """LCS length via the hybrid engine, with counters."""
    xa = as_symbols(a)
    xb = as_symbols(b)
    if params is None:
        params = default_hybrid_params(
            xa.size, xb.size,
            DEFAULT_KEY_BUDGET_BITS if key_budget_bits is None
            else key_budget_bits,
            dense_strategy=dense_strategy or "section3")
    else:
        if key_budget_bits is not None:
            params = replace(params, key_budget_bits=key_budget_bits)
        if dense_strategy is not None:
            params = replace(params, dense_strategy=dense_strategy)
    stats = EngineStats()
    value = _hybrid_core(xa, xb, params, 1, stats)
    return value, stats


def lcs_hybrid(a, b, params: HybridParams | None = None, *,
               key_budget_bits: int | None = None,
               dense_strategy: str | None = None) -> int:
    """LCS length of a and b via the hybrid engine."""
    value, _ = lcs_hybrid_stats(a, b, params,
                                key_budget_bits=key_budget_bits,
                                dense_strategy=dense_strategy)
    return value


def recommend_engine(n: int, m: int, r: int, sigma: int) -> str:
    """Advisory engine choice from the instance shape and match count.

    With L = log2 of the larger side, the hybrid niche sits around
    n*m/L^2 matches, a loglog factor wide on each side. Far below it,
    scanning the match list wins (hunt_szymanski); inside it the hybrid
    engine wins provided the alphabet is not tiny; everywhere else
    plain tabulation is the safe default.
    """
    size = int(n) * int(m)
    hi_side = max(int(n), int(m), 4)
    lg = math.log2(hi_side)
    lglg = math.log2(lg)
    lglglg = max(math.log2(max(lglg, 1.0)), 1.0)
    low = size / (lg * lg * lglglg)
    high = size * lglg / (lg * lg)
    if r < low:
        return "hunt_szymanski"
    if r < high and sigma > lglglg:
        return "hybrid"
    return "tabulated"


__all__ = [
    "DENSE_STRATEGIES",
    "BlockCensus",
    "HybridParams",
    "SparseBlockKey",
    "SparseLut",
    "build_sparse_lut",
    "classify_blocks",
    "default_hybrid_params",
    "lcs_hybrid",
    "lcs_hybrid_stats",
    "recommend_engine",
    "sparse_block_transition",
]
