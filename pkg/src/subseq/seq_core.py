"""Sequence representation, alphabet normalization, match counting/indexing.

Symbols are non-negative machine integers below 2**32. All containers here
are immutable after construction and safe to share across worker threads.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InputFormatError, ParameterError

SYMBOL_BOUND = 1 << 32

# dense histograms are only built when the alphabet is plausibly dense;
# beyond this bound callers must normalize first
_DENSE_ALPHABET_CAP = 1 << 26


def as_symbols(data) -> np.ndarray:
    """Coerce input to a read-only int64 symbol array.

    Accepts Sequence, numpy arrays, iterables of ints, str (code points),
    and bytes (byte values).
    """
    if isinstance(data, Sequence):
        return data.symbols
    if isinstance(data, str):
        arr = np.frombuffer(data.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    elif isinstance(data, (bytes, bytearray)):
        arr = np.frombuffer(bytes(data), dtype=np.uint8).astype(np.int64)
    else:
        arr = data if isinstance(data, np.ndarray) else np.asarray(
            data if hasattr(data, "__len__") else list(data))
        if arr.ndim != 1:
            raise InputFormatError("symbol input must be one-dimensional")
        try:
            arr = arr.astype(np.int64, copy=True)
        except (TypeError, ValueError) as exc:
            raise InputFormatError(f"cannot interpret input as integer symbols: {exc}")
    if arr.size and (arr.min() < 0 or arr.max() >= SYMBOL_BOUND):
        raise InputFormatError("symbols must be integers in [0, 2**32)")
    arr.flags.writeable = False
    return arr


class Sequence:
    """An immutable run of integer symbols over a declared alphabet bound."""

    __slots__ = ("symbols", "sigma_max")

    def __init__(self, data, sigma_max: int | None = None):
        symbols = as_symbols(data)
        if sigma_max is None:
            sigma_max = int(symbols.max()) + 1 if symbols.size else 0
        if sigma_max > SYMBOL_BOUND:
            raise InputFormatError("alphabet bound exceeds 2**32")
        if symbols.size and int(symbols.max()) >= sigma_max:
            raise InputFormatError("symbol outside declared alphabet bound")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "sigma_max", int(sigma_max))

    def __setattr__(self, name, value):
        raise AttributeError("Sequence is immutable")

    def __len__(self):
        return int(self.symbols.size)

    @property
    def length(self) -> int:
        return int(self.symbols.size)

    def __iter__(self):
        return iter(int(v) for v in self.symbols)

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return np.array_equal(self.symbols, other.symbols)

    def __repr__(self):
        head = ",".join(str(int(v)) for v in self.symbols[:8])
        tail = ",..." if len(self) > 8 else ""
        return f"Sequence([{head}{tail}], length={len(self)}, sigma_max={self.sigma_max})"


@dataclass(frozen=True)
class AlphabetStats:
    """Per-symbol occurrence histograms of a pair plus total match count r."""

    histogram_a: np.ndarray
    histogram_b: np.ndarray
    match_count_r: int

    def __post_init__(self):
        r = int(np.dot(self.histogram_a, self.histogram_b))
        if r != self.match_count_r:
            raise ParameterError("match_count_r inconsistent with histograms")


def normalize_alphabet(a, b):
    """Remap both inputs onto the dense alphabet {0..sigma'-1}.

    The mapping is the sorted order of the distinct symbols across both
    inputs; it preserves every pairwise equality relation. Returns
    (Sequence, Sequence, sigma_prime).
    """
    xa = as_symbols(a)
    xb = as_symbols(b)
    uniq = np.unique(np.concatenate([xa, xb])) if xa.size + xb.size else np.empty(0, np.int64)
    na = np.searchsorted(uniq, xa).astype(np.int64)
    nb = np.searchsorted(uniq, xb).astype(np.int64)
    sigma_prime = int(uniq.size)
    return Sequence(na, sigma_max=sigma_prime), Sequence(nb, sigma_max=sigma_prime), sigma_prime


def alphabet_stats(a, b) -> AlphabetStats:
    """Histograms over the joint alphabet plus r; expects dense-ish symbols."""
    xa = as_symbols(a)
    xb = as_symbols(b)
    hi = 0
    if xa.size:
        hi = max(hi, int(xa.max()) + 1)
    if xb.size:
        hi = max(hi, int(xb.max()) + 1)
    if hi > _DENSE_ALPHABET_CAP:
        raise ParameterError("alphabet too sparse for histograms; normalize first")
    ha = np.bincount(xa, minlength=hi)
    hb = np.bincount(xb, minlength=hi)
    return AlphabetStats(ha, hb, int(np.dot(ha, hb)))


def count_matches(a, b) -> int:
    """Number of index pairs (i, j) with A[i] == B[j].

    Histogram product over the joint alphabet: linear in n + sigma' for dense
    inputs, with a sort-based fallback for sparse symbol values.
    """
    xa = as_symbols(a)
    xb = as_symbols(b)
    if xa.size == 0 or xb.size == 0:
        return 0
    hi = max(int(xa.max()), int(xb.max())) + 1
    if hi <= _DENSE_ALPHABET_CAP:
        ha = np.bincount(xa, minlength=hi)
        hb = np.bincount(xb, minlength=hi)
        return int(np.dot(ha, hb))
    ua, ca = np.unique(xa, return_counts=True)
    ub, cb = np.unique(xb, return_counts=True)
    pos = np.searchsorted(ua, ub)
    ok = (pos < ua.size) & (ua[np.minimum(pos, ua.size - 1)] == ub)
    return int(np.dot(ca[pos[ok]], cb[ok]))


@dataclass(frozen=True)
class MatchIndex:
    """Match coordinates bucketed per block, in block-local coordinates.

    The DP grid cell (i, j) (1-based) belongs to block
    (floor((i-1)/block_rows), floor((j-1)/block_cols)): a block owns its
    interior plus its output (bottom/right) border, never its input border,
    so every match belongs to exactly one block and per-block counts sum to
    the total match count.

    coords stores (li-1)*block_cols + (lj-1) for local coordinates
    li in 1..block_rows, lj in 1..block_cols, row-major sorted. Blocks whose
    count exceeds stored_cap have their coordinates elided (counts are still
    exact); stored_cap is None for a full index.
    """

    block_rows: int
    block_cols: int
    grid_shape: tuple
    counts: np.ndarray
    offsets: np.ndarray
    coords: np.ndarray
    total_matches: int
    stored_cap: int | None = field(default=None)

    def count(self, bi: int, bj: int) -> int:
        return int(self.counts[bi, bj])

    def block_matches(self, bi: int, bj: int) -> list:
        """Stored matches of one block as 1-based (row, col) local pairs."""
        g = bi * self.grid_shape[1] + bj
        lo, hi = int(self.offsets[g]), int(self.offsets[g + 1])
        bc = self.block_cols
        return [(int(c) // bc + 1, int(c) % bc + 1) for c in self.coords[lo:hi]]

    @property
    def stored_matches(self) -> int:
        return int(self.coords.size)


def enumerate_block_matches(a, b, block_rows: int, block_cols: int,
                            stored_cap: int | None = None) -> MatchIndex:
    """Bucket every match into its owning block (see MatchIndex).

    stored_cap, when given, elides coordinate storage for blocks with more
    than that many matches (their counts remain exact); engines use this to
    skip dense-block coordinates.
    """
    if block_rows < 1 or block_cols < 1:
        raise ParameterError("block dimensions must be >= 1")
    xa = as_symbols(a)
    xb = as_symbols(b)
    n, m = xa.size, xb.size
    nbi = -(-n // block_rows) if n else 0
    nbj = -(-m // block_cols) if m else 0
    nblocks = nbi * nbj
    if nblocks == 0:
        return MatchIndex(block_rows, block_cols, (nbi, nbj),
                          np.zeros((nbi, nbj), np.int64), np.zeros(1, np.int64),
                          np.empty(0, np.int32), 0, stored_cap)
    uniq = np.unique(np.concatenate([xa, xb]))
    na = np.searchsorted(uniq, xa).astype(np.int64)
    nb = np.searchsorted(uniq, xb).astype(np.int64)
    occ_off = np.zeros(uniq.size + 1, np.int64)
    np.cumsum(np.bincount(nb, minlength=uniq.size), out=occ_off[1:])
    occ_pos = np.argsort(nb, kind="stable").astype(np.int64)

    counts = np.zeros(nblocks, np.int64)
    _kernels.block_match_counts(na, occ_off, occ_pos,
                                block_rows, block_cols, nbj, counts)
    total = int(counts.sum())
    cap = block_rows * block_cols if stored_cap is None else int(stored_cap)
    stored = np.where(counts <= cap, counts, 0)
    offsets = np.zeros(nblocks + 1, np.int64)
    np.cumsum(stored, out=offsets[1:])
    coords = np.empty(int(offsets[-1]), np.int32)
    cursor = np.zeros(nblocks, np.int64)
    _kernels.block_match_fill(na, occ_off, occ_pos, block_rows, block_cols,
                              nbj, counts, cap, offsets, cursor, coords)
    return MatchIndex(block_rows, block_cols, (nbi, nbj),
                      counts.reshape(nbi, nbj), offsets, coords, total, stored_cap)
