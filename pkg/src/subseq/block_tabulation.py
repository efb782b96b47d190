"""Table-driven LCS over fixed-size blocks (Four-Russians style).

The DP matrix is cut into blocks of x1 columns (positions of A) by x2 rows
(positions of B) with shared borders. Borders are carried differentially:
along any row or column the value moves by 0 or 1 for subsequence scoring,
so a border fits one bit per cell. A stripe is a band of x2 rows; all blocks
of a stripe share the same B substring, so one lookup table keyed on the
block's A codes and entry borders resolves each block in O(1).

Symbols are remapped inside y-by-y superblocks: the B segment's q distinct
symbols become codes 0..q-1 and every A symbol becomes its code or the
sentinel q. Only equality matters for the DP, and q <= min(y, sigma) makes
the codes narrow enough to pack several per machine word.

The engine materializes one stamped table per computation and lazily fills
entries the stripe actually touches; `build_stripe_lut` builds the same
table eagerly for inspection. `diff_bits=2` switches every piece to the
{-1,0,1} differentials of distance scoring (used by the edit engines).
"""

from dataclasses import dataclass, field
from math import log2

import numpy as np

from ._kernels import (
    tab_block_value,
    tab_build_lut,
    tab_edit_key_invalid,
    tab_ragged_cols,
    tab_ragged_rows,
    tab_stripe_scan,
)
from .errors import ParameterError
from .instrumentation import EngineStats
from .seq_core import as_symbols, normalize_alphabet

DEFAULT_KEY_BUDGET_BITS = 22
WORD_BITS = 64

# hard allocation guards: 2^26 entries is 768 MB of (value, stamp) pairs
_LAZY_BITS_CAP = 26
_EAGER_BITS_CAP = 24

__all__ = [
    "DEFAULT_KEY_BUDGET_BITS",
    "TabulationParams",
    "SuperblockCode",
    "BlockLut",
    "BlockIo",
    "choose_params",
    "build_superblock_code",
    "remap_a_snippet",
    "build_stripe_lut",
    "pack_stripe_key",
    "unpack_stripe_value",
    "lcs_tabulated",
    "lcs_tabulated_stats",
]


def _width(vmax: int) -> int:
    """Bits needed for the inclusive value range [0, vmax]."""
    return max(1, int(vmax).bit_length())


def _ceil_log2(v: int) -> int:
    return (int(v) - 1).bit_length() if v > 1 else 0


@dataclass(frozen=True)
class TabulationParams:
    """Block geometry of the stripe engine.

    x1 is the block width along A, x2 the stripe height along B, y the
    superblock side used for alphabet remapping. key_budget_bits caps the
    packed key width (and with it the table size); value_bits declares the
    word the packed result must fit.
    """

    y: int
    x1: int
    x2: int
    key_budget_bits: int = DEFAULT_KEY_BUDGET_BITS
    value_bits: int = WORD_BITS

    def __post_init__(self) -> None:
        if min(self.y, self.x1, self.x2) < 1:
            raise ParameterError("block sides must be >= 1")
        if self.y % self.x2:
            raise ParameterError(
                f"stripe height x2={self.x2} must divide superblock side y={self.y}")
        if self.key_budget_bits > WORD_BITS:
            raise ParameterError("key budget exceeds the machine word")
        key_need = self.x1 * _ceil_log2(2 * (self.y + 1)) + self.x2
        if key_need > self.key_budget_bits:
            raise ParameterError(
                f"key needs {key_need} bits, budget is {self.key_budget_bits}")
        value_need = self.x1 + self.x2 + _width(min(self.x1, self.x2))
        if value_need > self.value_bits:
            raise ParameterError(
                f"value needs {value_need} bits, declared width is {self.value_bits}")


def choose_params(n: int, m: int,
                  key_budget_bits: int = DEFAULT_KEY_BUDGET_BITS,
                  *, value_bits: int = WORD_BITS,
                  diff_bits: int = 1) -> TabulationParams:
    """Pick the largest block geometry that fits the key budget.

    The asymptotic settings x1 = log n / (4 log log n), x2 = log n / 4 and
    y = log^2 n / 2 act as caps; within them the search maximizes
    (x1*x2, x1+x2, y). Tiny inputs degrade to x1 = x2 = 1. With diff_bits=2
    the key accounting uses two bits per border cell so the result is also
    feasible for distance scoring.
    """
    if not n >= m >= 1:
        raise ParameterError("choose_params expects n >= m >= 1")
    # a LUT key can never exceed the machine word, whatever the caller allows
    key_budget_bits = min(key_budget_bits, WORD_BITS)
    L = log2(n) if n > 1 else 1.0
    LL = log2(max(L, 2.0))
    x1_cap = max(1, int(L / (4.0 * LL)))
    x2_cap = max(1, int(L / 4.0))
    y_raw = max(1, int(L * L / 2.0))

    def key_need(x1: int, x2: int, y: int) -> int:
        if diff_bits == 1:
            return x1 * _ceil_log2(2 * (y + 1)) + x2
        return x1 * _ceil_log2(y + 1) + 2 * (x1 + x2)

    best = None
    best_score = None
    for x1 in range(1, x1_cap + 1):
        for x2 in range(1, x2_cap + 1):
            y = max(x2, y_raw // x2 * x2)
            while y >= x2 and key_need(x1, x2, y) > key_budget_bits:
                y -= x2
            if y < x2:
                continue
            if x1 + x2 + _width(min(x1, x2)) > value_bits:
                continue
            score = (x1 * x2, x1 + x2, y)
            if best_score is None or score > best_score:
                best_score = score
                best = (x1, x2, y)
    if best is None:
        raise ParameterError(
            f"no block geometry fits a {key_budget_bits}-bit key budget")
    x1, x2, y = best
    return TabulationParams(y=y, x1=x1, x2=x2,
                            key_budget_bits=key_budget_bits,
                            value_bits=value_bits)


@dataclass(frozen=True)
class SuperblockCode:
    """Dense code for the distinct symbols of one B segment.

    code_of maps each segment symbol to its rank among the segment's sorted
    distinct symbols; absent symbols take the sentinel q.
    """

    q: int
    code_of: dict
    sentinel: int

    def __post_init__(self) -> None:
        if self.sentinel != self.q:
            raise ParameterError("sentinel must equal the code count q")
        codes = sorted(self.code_of.values())
        if codes != list(range(self.q)):
            raise ParameterError("codes must be exactly 0..q-1")


def build_superblock_code(b_segment) -> SuperblockCode:
    """Sort the segment's distinct symbols and number them 0..q-1."""
    seg = as_symbols(b_segment)
    uniq = np.unique(seg)
    q = int(uniq.shape[0])
    return SuperblockCode(q=q,
                          code_of={int(s): i for i, s in enumerate(uniq)},
                          sentinel=q)


def remap_a_snippet(a_segment, code: SuperblockCode) -> np.ndarray:
    """Replace each A symbol by its segment code, or the sentinel.

    Equality against the segment is preserved exactly: remapped values agree
    and are below the sentinel iff the original symbols were equal.
    """
    seg = as_symbols(a_segment)
    out = np.full(seg.shape[0], code.sentinel, dtype=np.int64)
    for i, s in enumerate(seg.tolist()):
        out[i] = code.code_of.get(s, code.sentinel)
    return out


# ---------------------------------------------------------------------------
# packed keys and values

# Key, low to high: left diffs (x2 fields), top diffs (x1 fields), A codes
# (x1 fields of code_bits). Value, low to high: bottom diffs (x1 fields),
# right diffs (x2 fields), corner delta BR-UL. With diff_bits=2 each diff
# field stores d+1 and the delta is offset by x1+x2.


def pack_stripe_key(a_codes, top_diffs, left_diffs,
                    code_bits: int, diff_bits: int = 1) -> int:
    key = 0
    db = diff_bits
    x1 = len(top_diffs)
    x2 = len(left_diffs)
    off = db - 1
    for s, d in enumerate(left_diffs):
        key |= (int(d) + off) << (db * s)
    for t, d in enumerate(top_diffs):
        key |= (int(d) + off) << (db * (x2 + t))
    base = db * (x1 + x2)
    for t, c in enumerate(a_codes):
        key |= int(c) << (base + code_bits * t)
    return key


def unpack_stripe_value(value: int, x1: int, x2: int, diff_bits: int = 1):
    """Split a packed result into (bottom_diffs, right_diffs, corner_delta)."""
    db = diff_bits
    off = db - 1
    mask = (1 << db) - 1
    bottom = np.empty(x1, dtype=np.int64)
    right = np.empty(x2, dtype=np.int64)
    v = int(value)
    for t in range(x1):
        bottom[t] = ((v >> (db * t)) & mask) - off
    for s in range(x2):
        right[s] = ((v >> (db * (x1 + s))) & mask) - off
    delta = (v >> (db * (x1 + x2))) - (x1 + x2) * off
    return bottom, right, delta


@dataclass(frozen=True)
class BlockIo:
    """Input borders of one block, plus the explicit value at its top-left."""

    top_diffs: np.ndarray
    left_diffs: np.ndarray
    a_codes: np.ndarray
    corner_value: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "top_diffs",
                           np.asarray(self.top_diffs, dtype=np.int64))
        object.__setattr__(self, "left_diffs",
                           np.asarray(self.left_diffs, dtype=np.int64))
        object.__setattr__(self, "a_codes",
                           np.asarray(self.a_codes, dtype=np.int64))
        for d in (self.top_diffs, self.left_diffs):
            if d.size and (d.min() < -1 or d.max() > 1):
                raise ParameterError("border differentials must be in {-1,0,1}")
        if self.a_codes.size and self.a_codes.min() < 0:
            raise ParameterError("codes must be non-negative")


@dataclass
class BlockLut:
    """Eagerly built lookup table for one stripe's B codes.

    entries[key] packs the block result for every possible packed key; with
    diff_bits=2 keys containing an undecodable diff field hold -1.
    """

    entries: np.ndarray
    b_codes: np.ndarray
    x1: int
    x2: int
    code_bits: int
    diff_bits: int = 1
    key_bits: int = field(default=0)

    def __post_init__(self) -> None:
        want = self.diff_bits * (self.x1 + self.x2) + self.x1 * self.code_bits
        if self.key_bits == 0:
            self.key_bits = want
        if self.key_bits != want:
            raise ParameterError("key width disagrees with the field layout")
        if self.entries.shape[0] != 1 << self.key_bits:
            raise ParameterError("entry count must be 2^key_bits")

    def entry(self, key: int) -> int:
        return int(self.entries[key])

    def lookup(self, io: BlockIo):
        """Resolve one block: (bottom_diffs, right_diffs, corner_delta)."""
        if len(io.top_diffs) != self.x1 or len(io.left_diffs) != self.x2:
            raise ParameterError("border lengths must match the block sides")
        if self.diff_bits == 1:
            for d in (io.top_diffs, io.left_diffs):
                if d.size and d.min() < 0:
                    raise ParameterError(
                        "negative differentials need a diff_bits=2 table")
        if len(io.a_codes) != self.x1:
            raise ParameterError("expected one code per block column")
        if io.a_codes.size and int(io.a_codes.max()) >= 1 << self.code_bits:
            raise ParameterError("code exceeds the table's code width")
        key = pack_stripe_key(io.a_codes, io.top_diffs, io.left_diffs,
                              self.code_bits, self.diff_bits)
        return unpack_stripe_value(self.entries[key], self.x1, self.x2,
                                   self.diff_bits)


def build_stripe_lut(b_block_codes, params: TabulationParams,
                     *, code_bits: int | None = None,
                     diff_bits: int = 1) -> BlockLut:
    """Build the full table for one stripe's x2 B codes.

    Every key's value equals the direct DP on the decoded block. code_bits
    defaults to the width that fits the largest given code plus a sentinel.
    """
    b_codes = np.asarray(b_block_codes, dtype=np.int64)
    if b_codes.ndim != 1 or b_codes.shape[0] != params.x2:
        raise ParameterError("expected exactly x2 B codes")
    if b_codes.size and b_codes.min() < 0:
        raise ParameterError("codes must be non-negative")
    if diff_bits not in (1, 2):
        raise ParameterError("diff_bits must be 1 or 2")
    if code_bits is None:
        code_bits = _width(int(b_codes.max()) + 1)
    elif b_codes.size and int(b_codes.max()) >= 1 << code_bits:
        raise ParameterError("a B code does not fit code_bits")
    key_bits = diff_bits * (params.x1 + params.x2) + params.x1 * code_bits
    if key_bits > params.key_budget_bits:
        raise ParameterError(
            f"key width {key_bits} exceeds the {params.key_budget_bits}-bit budget")
    if key_bits > _EAGER_BITS_CAP:
        raise ParameterError(f"eager table of 2^{key_bits} entries refused")
    entries = tab_build_lut(b_codes, params.x1, params.x2, code_bits, diff_bits)
    return BlockLut(entries=entries, b_codes=b_codes, x1=params.x1,
                    x2=params.x2, code_bits=code_bits, diff_bits=diff_bits)


# ---------------------------------------------------------------------------
# the stripe engine


def _tabulated_core(a: np.ndarray, b: np.ndarray, sigma: int,
                    params: TabulationParams, diff_bits: int,
                    stats: EngineStats) -> int:
    """Shared stripe scan over normalized inputs; returns the final corner.

    a and b hold symbols 0..sigma-1. diff_bits=1 scores subsequences (final
    corner = LLCS), diff_bits=2 scores distance (final corner = edit
    distance). One stamped table serves all stripes; entries are filled on
    first touch and invalidated wholesale by the stripe stamp.
    """
    n = int(a.shape[0])
    m = int(b.shape[0])
    x1, x2, y = params.x1, params.x2, params.y
    db = diff_bits
    base = m if db == 2 else 0
    stats.cells += n * m

    cb = _width(min(y, max(sigma, 1)))
    key_bits = db * (x1 + x2) + x1 * cb
    if key_bits > params.key_budget_bits:
        raise ParameterError(
            f"key width {key_bits} exceeds the {params.key_budget_bits}-bit budget")
    if key_bits > _LAZY_BITS_CAP:
        raise ParameterError(f"table of 2^{key_bits} entries refused")
    value_need = db * (x1 + x2) + _width((x1 + x2) * db)
    if value_need > 63:
        raise ParameterError("packed value does not fit a word")

    top = np.zeros(n, np.int8) if db == 1 else np.ones(n, np.int8)
    a_codes = np.zeros(n, np.int64)
    row0 = np.empty(n + 1, np.int64)
    row1 = np.empty(n + 1, np.int64)
    scratch = np.empty((x2 + 1, x1 + 1), np.int64)

    full_stripes = m // x2
    nb = n // x1
    n_full = nb * x1
    tail = n - n_full
    left0 = 0
    if db == 2:
        for s in range(x2):
            left0 |= 2 << (2 * s)

    lut_val = lut_stamp = None
    if full_stripes and nb:
        lut_val = np.empty(1 << key_bits, np.int64)
        lut_stamp = np.zeros(1 << key_bits, np.int32)
        stats.lut_allocations += 1
        stats.lut_capacity = 1 << key_bits
        stats.aux_lut_bytes += lut_val.nbytes + lut_stamp.nbytes

    uniq = None
    for si in range(full_stripes):
        s0 = si * x2
        if uniq is None or s0 % y == 0:
            seg = b[s0:s0 + y]
            uniq = np.unique(seg)
            q = int(uniq.shape[0])
            if n:
                pos = np.searchsorted(uniq, a)
                np.minimum(pos, q - 1, out=pos)
                np.copyto(a_codes, np.where(uniq[pos] == a, pos, q))
        b_codes = np.searchsorted(uniq, b[s0:s0 + x2]).astype(np.int64)
        if nb:
            built, left_out = tab_stripe_scan(
                a_codes, n_full, b_codes, top, si + 1,
                lut_val, lut_stamp, x1, x2, cb, db, left0, scratch)
            stats.lut_entries += int(built)
        else:
            left_out = left0
        stats.blocks += nb
        if tail:
            tab_ragged_cols(a_codes[n_full:], b_codes, top[n_full:],
                            left_out, x2, db, row0, row1)
            stats.blocks += 1
            stats.ragged_cells += x2 * tail

    mt = m - full_stripes * x2
    if mt:
        tab_ragged_rows(a, b[m - mt:], top, db, row0, row1)
        stats.blocks += nb + (1 if tail else 0)
        stats.ragged_cells += mt * n

    stats.aux_border_bytes += (top.nbytes + a_codes.nbytes + row0.nbytes
                               + row1.nbytes + scratch.nbytes)
    return base + int(top.sum(dtype=np.int64))


def lcs_tabulated_stats(a, b, params: TabulationParams | None = None,
                        *, key_budget_bits: int | None = None):
    """LLCS via the stripe engine, with instrumentation counters."""
    na, nb, sigma = normalize_alphabet(a, b)
    stats = EngineStats()
    if len(na) == 0 or len(nb) == 0:
        return 0, stats
    if params is None:
        hi = max(len(na), len(nb))
        lo = max(min(len(na), len(nb)), 1)
        params = choose_params(hi, lo, key_budget_bits or DEFAULT_KEY_BUDGET_BITS)
    value = _tabulated_core(na.symbols, nb.symbols, sigma, params, 1, stats)
    return value, stats


def lcs_tabulated(a, b, params: TabulationParams | None = None,
                  *, key_budget_bits: int | None = None) -> int:
    """Length of the longest common subsequence, blockwise in O(1) per block."""
    value, _ = lcs_tabulated_stats(a, b, params, key_budget_bits=key_budget_bits)
    return value
