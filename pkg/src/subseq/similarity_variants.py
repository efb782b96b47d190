"""Distance, transposition-invariant, and three-sequence variants.

The block engines score any DP whose border differentials fit their packed
keys, so edit distance reuses them verbatim with two-bit differentials.
On top of that this module adds two derived problems: the best common
subsequence over all alphabet transpositions (each shift routed to the
engine its match count favors) and the merged common subsequence of two
texts against a pattern, tabulated in cubes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numba import types as _nbtypes
from numba.typed import Dict as _TypedDict

from . import _kernels
from .block_tabulation import (
    DEFAULT_KEY_BUDGET_BITS,
    WORD_BITS,
    BlockIo,
    TabulationParams,
    _tabulated_core,
    _width,
    choose_params,
    lcs_tabulated,
)
from .dp_reference import lcs_naive
from .errors import ParameterError, SizeGuardError
from .instrumentation import EngineStats
from .seq_core import as_symbols, normalize_alphabet
from .sparse_hybrid import (
    HybridParams,
    _hybrid_core,
    default_hybrid_params,
    lcs_hybrid,
)

MERLCS_GRID_GUARD = 1 << 27
ROUTE_TABULATED = "tabulated"
ROUTE_HYBRID = "hybrid"

__all__ = [
    "CubeLut",
    "EditBlockIo",
    "MERLCS_GRID_GUARD",
    "TranspositionPlan",
    "default_transposition_tau",
    "edit_distance_hybrid",
    "edit_distance_hybrid_stats",
    "edit_distance_tabulated",
    "edit_distance_tabulated_stats",
    "lcts",
    "merlcs_tabulated",
    "merlcs_tabulated_stats",
    "plan_transpositions",
]


@dataclass(frozen=True)
class EditBlockIo(BlockIo):
    """Block borders in distance mode.

    Structurally a BlockIo, but documents that the differentials are the
    two-bit kind: -1 entries are legal and lookups must go to a table built
    with diff_bits=2 (one-bit tables reject negative borders).
    """

    diff_bits = 2


# ---------------------------------------------------------------------------
# edit distance through the block engines


def edit_distance_tabulated_stats(a, b, params: TabulationParams | None = None,
                                  *, key_budget_bits: int | None = None):
    """Unit-cost edit distance via the stripe engine, with counters.

    Same scan as the subsequence version; borders carry signed
    differentials, the empty-prefix row starts at +1 per cell, and the
    result is read off as len(b) plus the final top differentials.
    """
    na, nb, sigma = normalize_alphabet(a, b)
    stats = EngineStats()
    if len(na) == 0 or len(nb) == 0:
        return max(len(na), len(nb)), stats
    if params is None:
        hi = max(len(na), len(nb))
        lo = max(min(len(na), len(nb)), 1)
        params = choose_params(hi, lo,
                               key_budget_bits or DEFAULT_KEY_BUDGET_BITS,
                               diff_bits=2)
    value = _tabulated_core(na.symbols, nb.symbols, sigma, params, 2, stats)
    return value, stats


def edit_distance_tabulated(a, b, params: TabulationParams | None = None,
                            *, key_budget_bits: int | None = None) -> int:
    """Unit-cost edit distance, blockwise in O(1) per block."""
    value, _ = edit_distance_tabulated_stats(
        a, b, params, key_budget_bits=key_budget_bits)
    return value


def edit_distance_hybrid_stats(a, b, params: HybridParams | None = None, *,
                               key_budget_bits: int | None = None,
                               dense_strategy: str | None = None):
    """Unit-cost edit distance via the hybrid engine, with counters."""
    xa = as_symbols(a)
    xb = as_symbols(b)
    if params is None:
        params = default_hybrid_params(
            xa.size, xb.size,
            DEFAULT_KEY_BUDGET_BITS if key_budget_bits is None
            else key_budget_bits,
            diff_bits=2,
            dense_strategy=dense_strategy or "section3")
    else:
        if key_budget_bits is not None:
            params = replace(params, key_budget_bits=key_budget_bits)
        if dense_strategy is not None:
            params = replace(params, dense_strategy=dense_strategy)
    stats = EngineStats()
    value = _hybrid_core(xa, xb, params, 2, stats)
    return value, stats


def edit_distance_hybrid(a, b, params: HybridParams | None = None, *,
                         key_budget_bits: int | None = None,
                         dense_strategy: str | None = None) -> int:
    """Unit-cost edit distance via match-indexed sparse blocks."""
    value, _ = edit_distance_hybrid_stats(
        a, b, params, key_budget_bits=key_budget_bits,
        dense_strategy=dense_strategy)
    return value


# ---------------------------------------------------------------------------
# transposition-invariant common subsequence


def default_transposition_tau(n: int, m: int, sigma: int) -> float:
    """Match-count threshold above which a shift is worth tabulating.

    n*m*loglog(max(n, m))/sigma: the average shift holds n*m/sigma matches,
    and tabulation overtakes match-list methods once a shift is a loglog
    factor above average.
    """
    size = max(n, m, 4)
    return n * m * math.log2(math.log2(size)) / sigma


@dataclass(frozen=True)
class TranspositionPlan:
    """Per-shift match counts and the engine routing derived from them.

    counts[t + sigma - 1] holds r_t, the number of pairs (i, j) with
    b[j] - a[i] == t; shifts at or above tau are routed to the stripe
    engine, the rest to the hybrid engine. The counts of all shifts
    partition the n*m cell grid.
    """

    n: int
    m: int
    sigma: int
    counts: np.ndarray
    tau: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts",
                           np.asarray(self.counts, dtype=np.int64))
        if self.sigma < 1:
            raise ParameterError("sigma must be >= 1")
        if self.counts.shape != (2 * self.sigma - 1,):
            raise ParameterError("expected one count per shift")
        if self.counts.size and int(self.counts.min()) < 0:
            raise ParameterError("match counts cannot be negative")
        if int(self.counts.sum()) != self.n * self.m:
            raise ParameterError("shift counts must partition the cell grid")
        if self.tau < 0:
            raise ParameterError("tau cannot be negative")

    @property
    def transpositions(self) -> range:
        return range(-self.sigma + 1, self.sigma)

    def r(self, t: int) -> int:
        if not -self.sigma < t < self.sigma:
            raise ParameterError("shift outside the alphabet range")
        return int(self.counts[t + self.sigma - 1])

    def route(self, t: int) -> str:
        return ROUTE_TABULATED if self.r(t) >= self.tau else ROUTE_HYBRID

    @property
    def routing(self) -> dict:
        return {t: self.route(t) for t in self.transpositions}


def _sigma_symbols(data, sigma: int) -> np.ndarray:
    xs = as_symbols(data)
    if xs.size and (int(xs.min()) < 0 or int(xs.max()) >= sigma):
        raise ParameterError("symbols must lie in [0, sigma)")
    return xs


def plan_transpositions(a, b, sigma: int, *,
                        tau: float | None = None) -> TranspositionPlan:
    """Count the matches of every shift by correlating symbol histograms.

    r_t = sum_c hist_a[c] * hist_b[c + t], computed in O(n + m + sigma^2)
    without touching the cell grid.
    """
    if sigma < 1:
        raise ParameterError("sigma must be >= 1")
    xa = _sigma_symbols(a, sigma)
    xb = _sigma_symbols(b, sigma)
    ha = np.bincount(xa, minlength=sigma)
    hb = np.bincount(xb, minlength=sigma)
    counts = np.correlate(hb, ha, mode="full").astype(np.int64)
    if tau is None:
        tau = default_transposition_tau(xa.size, xb.size, sigma)
    return TranspositionPlan(n=int(xa.size), m=int(xb.size), sigma=int(sigma),
                             counts=counts, tau=float(tau))


LCTS_MODES = ("auto", "all_tabulated", "all_naive")


def lcts(a, b, sigma: int, mode: str = "auto", *,
         tau: float | None = None, workers: int | None = None,
         key_budget_bits: int | None = None) -> int:
    """Best common-subsequence length over all alphabet transpositions.

    Evaluates LCS(a + t, b) for every shift t in (-sigma, sigma) and keeps
    the maximum. A match under shift t means b[j] - a[i] == t, so each
    shift adds t to one input instead of materializing shifted copies of
    the other. mode "auto" routes each shift by its match count per the
    transposition plan; "all_tabulated" forces the stripe engine;
    "all_naive" is the reference. Shifts without matches are skipped. With
    workers > 1 the shifts are scored concurrently (the compiled scans
    release the GIL) and reduced by max.
    """
    if mode not in LCTS_MODES:
        raise ParameterError(f"mode must be one of {LCTS_MODES}")
    if sigma < 1:
        raise ParameterError("sigma must be >= 1")
    xa = _sigma_symbols(a, sigma)
    xb = _sigma_symbols(b, sigma)
    if xa.size == 0 or xb.size == 0:
        return 0
    plan = plan_transpositions(xa, xb, sigma, tau=tau)
    shifts = [t for t in plan.transpositions if plan.r(t) > 0]
    if not shifts:
        return 0
    budget = key_budget_bits or DEFAULT_KEY_BUDGET_BITS
    tab_params = None
    hyb_params = None
    if mode != "all_naive":
        hi = max(xa.size, xb.size)
        tab_params = choose_params(hi, max(min(xa.size, xb.size), 1), budget)
        hyb_params = default_hybrid_params(xa.size, xb.size, budget)

    def score(t: int) -> int:
        if t >= 0:
            sa, sb = xa + t, xb
        else:
            sa, sb = xa, xb - t
        if mode == "all_naive":
            return lcs_naive(sa, sb)
        if mode == "all_tabulated" or plan.route(t) == ROUTE_TABULATED:
            return lcs_tabulated(sa, sb, tab_params)
        return lcs_hybrid(sa, sb, hyb_params)

    if workers is not None and workers > 1 and len(shifts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return max(pool.map(score, shifts))
    return max(score(t) for t in shifts)


# ---------------------------------------------------------------------------
# merged common subsequence in cubes


@dataclass(frozen=True)
class CubeLut:
    """Packed-key transition table for one column of b x b x b cubes.

    A key holds the cube's pattern slab remapped against the column's two
    block alphabets (code_bits per symbol, absent symbols share one
    sentinel) plus the three incoming faces relative to the anchor corner:
    three b-bit anchor edges and three b^2-bit faces, one bit per cell.
    The value packs the three outgoing faces the same way. Tables are
    hash maps because realistic key widths are far too wide to enumerate.
    """

    b: int
    key_budget_bits: int = WORD_BITS
    code_bits: int = 0
    key_bits: int = 0
    value_bits: int = 0

    def __post_init__(self) -> None:
        if self.b < 1:
            raise ParameterError("cube side must be >= 1")
        if self.key_budget_bits < 1:
            raise ParameterError("key budget must be positive")
        cb = _width(2 * self.b)
        if self.code_bits == 0:
            object.__setattr__(self, "code_bits", cb)
        elif self.code_bits < cb:
            raise ParameterError("code width cannot address both blocks")
        want = self.b * self.code_bits + 3 * self.b + 3 * self.b * self.b
        if self.key_bits == 0:
            object.__setattr__(self, "key_bits", want)
        if self.key_bits != want:
            raise ParameterError("key width disagrees with the field layout")
        vwant = 3 * self.b * self.b
        if self.value_bits == 0:
            object.__setattr__(self, "value_bits", vwant)
        if self.value_bits != vwant:
            raise ParameterError("value width disagrees with the face size")
        cap = min(self.key_budget_bits, WORD_BITS - 1)
        if self.key_bits > cap:
            raise ParameterError(
                f"cube key needs {self.key_bits} bits, budget allows {cap}")
        if self.value_bits > WORD_BITS - 1:
            raise ParameterError("packed faces do not fit a word")

    def new_table(self):
        """A fresh empty table (cleared and reused per column)."""
        return _TypedDict.empty(_nbtypes.int64, _nbtypes.int64)


def merlcs_tabulated_stats(a, b, p, cube_b: int = 2, *,
                           key_budget_bits: int | None = None):
    """Merged common-subsequence length in O(1) per cube, with counters.

    Fills the (n+1) x (m+1) x (u+1) grid: boundary planes by direct DP,
    the interior in b^3 cubes memoized per column, ragged remainders by
    one sweep over everything outside the cube region.
    """
    xa = as_symbols(a)
    xb = as_symbols(b)
    xp = as_symbols(p)
    budget = WORD_BITS if key_budget_bits is None else key_budget_bits
    lut = CubeLut(b=int(cube_b), key_budget_bits=budget)
    stats = EngineStats()
    n, m, u = int(xa.size), int(xb.size), int(xp.size)
    stats.cells = n * m * u
    grid_cells = (n + 1) * (m + 1) * (u + 1)
    if grid_cells > MERLCS_GRID_GUARD:
        raise SizeGuardError(
            f"grid of {grid_cells} cells exceeds the in-memory bound")
    # values are capped by min(n, m, u) <= cbrt(guard), so int16 is safe
    grid = np.zeros((n + 1, m + 1, u + 1), np.int16)
    _kernels.cube_boundary_planes(xa, xb, xp, grid)
    bs = lut.b
    nbi, nbj, ub = n // bs, m // bs, u // bs
    i_full = j_full = k_full = 0
    if nbi and nbj and ub:
        table = lut.new_table()
        stats.lut_allocations = 1
        for ib in range(nbi):
            for jb in range(nbj):
                table.clear()
                stats.lut_entries += int(_kernels.cube_column(
                    xa, xb, xp, grid, ib * bs, jb * bs, bs,
                    lut.code_bits, table))
        stats.blocks = nbi * nbj * ub
        i_full, j_full, k_full = nbi * bs, nbj * bs, ub * bs
    stats.ragged_cells = int(_kernels.cube_ragged(
        xa, xb, xp, grid, i_full, j_full, k_full))
    # hash-map payload approximation; the grid itself is the working set
    stats.aux_lut_bytes = stats.lut_entries * 16
    stats.extra["grid_bytes"] = grid.nbytes
    return int(grid[n, m, u]), stats


def merlcs_tabulated(a, b, p, cube_b: int = 2, *,
                     key_budget_bits: int | None = None) -> int:
    """Longest subsequence of p splittable into subsequences of a and b."""
    value, _ = merlcs_tabulated_stats(a, b, p, cube_b,
                                      key_budget_bits=key_budget_bits)
    return value
