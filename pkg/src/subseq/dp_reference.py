"""Reference dynamic-programming solvers and independent brute-force oracles.

These are the baselines every block engine is tested against:
row-rolling classic DPs (compiled), the threshold-list sparse LCS, and
exponential enumerators that act as oracles for the oracles.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SizeGuardError
from .seq_core import as_symbols, normalize_alphabet

BRUTEFORCE_LCS_GUARD = 20
BRUTEFORCE_MERLCS_GUARD = 14


@dataclass(frozen=True)
class DpMatrix:
    """A full (n+1) x (m+1) DP table with its adjacency ranges validated.

    kind "lcs": row and column differences lie in {0, 1}.
    kind "edit": row and column differences lie in {-1, 0, 1}.
    """

    values: np.ndarray
    kind: str

    def __post_init__(self):
        v = self.values
        if v.ndim != 2:
            raise ValueError("DpMatrix expects a 2-d table")
        if v.size and v.min() < 0:
            raise ValueError("DpMatrix values must be non-negative")
        dr = np.diff(v, axis=0)
        dc = np.diff(v, axis=1)
        lo = 0 if self.kind == "lcs" else -1
        if self.kind not in ("lcs", "edit"):
            raise ValueError(f"unknown DpMatrix kind: {self.kind}")
        for d in (dr, dc):
            if d.size and (d.min() < lo or d.max() > 1):
                raise ValueError(f"adjacency violation in {self.kind} table")

    @property
    def result(self) -> int:
        return int(self.values[-1, -1])


def lcs_naive(a, b) -> int:
    """Longest common subsequence length, classic O(nm) row-rolling DP."""
    return int(_kernels.lcs_rows(as_symbols(a), as_symbols(b)))


def lcs_matrix(a, b) -> DpMatrix:
    """Full LCS table (for invariants and block-engine cross-checks)."""
    xa, xb = as_symbols(a), as_symbols(b)
    out = np.empty((xa.size + 1, xb.size + 1), np.int64)
    _kernels.lcs_fill(xa, xb, out)
    return DpMatrix(out, "lcs")


def edit_distance_naive(a, b) -> int:
    """Unit-cost Levenshtein distance, classic O(nm) row-rolling DP."""
    return int(_kernels.edit_rows(as_symbols(a), as_symbols(b)))


def edit_matrix(a, b) -> DpMatrix:
    """Full edit-distance table."""
    xa, xb = as_symbols(a), as_symbols(b)
    out = np.empty((xa.size + 1, xb.size + 1), np.int64)
    _kernels.edit_fill(xa, xb, out)
    return DpMatrix(out, "edit")


def _is_subsequence(needle, hay) -> bool:
    it = iter(hay)
    return all(any(h == x for h in it) for x in needle)


def lcs_bruteforce(a, b) -> int:
    """LCS length by subsequence enumeration; |shorter input| <= 20."""
    xa, xb = as_symbols(a), as_symbols(b)
    short, long_ = (xa, xb) if xa.size <= xb.size else (xb, xa)
    if short.size > BRUTEFORCE_LCS_GUARD:
        raise SizeGuardError(
            f"bruteforce LCS limited to {BRUTEFORCE_LCS_GUARD} symbols")
    short = [int(v) for v in short]
    long_ = [int(v) for v in long_]
    for length in range(len(short), 0, -1):
        for idx in itertools.combinations(range(len(short)), length):
            if _is_subsequence([short[i] for i in idx], long_):
                return length
    return 0


def hunt_szymanski(a, b) -> int:
    """LCS length via the threshold list, O(n + r log m).

    Inputs are normalized internally; only matching cells are visited, each
    with one binary search over the current threshold list.
    """
    na, nb, sigma = normalize_alphabet(a, b)
    xa, xb = na.symbols, nb.symbols
    if xa.size == 0 or xb.size == 0:
        return 0
    occ_off = np.zeros(sigma + 1, np.int64)
    np.cumsum(np.bincount(xb, minlength=sigma), out=occ_off[1:])
    occ_pos = np.argsort(xb, kind="stable").astype(np.int64)
    return int(_kernels.hs_scan(xa, occ_off, occ_pos, xb.size))


def merlcs_naive(a, b, p) -> int:
    """Merged LCS: longest subsequence T of P that splits into a
    subsequence of A plus a subsequence of B (3-d DP, rolling planes)."""
    return int(_kernels.merlcs_planes(as_symbols(a), as_symbols(b), as_symbols(p)))


def merlcs_matrix(a, b, p) -> np.ndarray:
    """Full (n+1) x (m+1) x (u+1) merged-LCS table (test harness use)."""
    xa, xb, xp = as_symbols(a), as_symbols(b), as_symbols(p)
    out = np.empty((xa.size + 1, xb.size + 1, xp.size + 1), np.int64)
    _kernels.merlcs_fill(xa, xb, xp, out)
    return out


def _next_occurrence_table(seq, sigma):
    # nxt[i][c] = smallest 1-based position > i holding symbol c, else len+1
    n = len(seq)
    nxt = np.full((n + 2, sigma), n + 1, np.int64)
    for i in range(n - 1, -1, -1):
        nxt[i] = nxt[i + 1]
        nxt[i][seq[i]] = i + 1
    return nxt


def merlcs_bruteforce(a, b, p) -> int:
    """Merged LCS by enumerating subsequences of P; |P| <= 14.

    Each candidate T is checked by a feasibility DP over states
    (symbols of T consumed, A prefix used) -> minimal B prefix used, which
    decides whether T's positions can be 2-colored into a subsequence of A
    and a subsequence of B.
    """
    xa, xb, xp = as_symbols(a), as_symbols(b), as_symbols(p)
    if xp.size > BRUTEFORCE_MERLCS_GUARD:
        raise SizeGuardError(
            f"bruteforce MerLCS limited to |P| <= {BRUTEFORCE_MERLCS_GUARD}")
    uniq = np.unique(np.concatenate([xa, xb, xp]))
    ca = np.searchsorted(uniq, xa)
    cb = np.searchsorted(uniq, xb)
    cp = [int(v) for v in np.searchsorted(uniq, xp)]
    sigma = int(uniq.size)
    if sigma == 0:
        return 0
    n, m, u = ca.size, cb.size, len(cp)
    nxt_a = _next_occurrence_table(ca, sigma)
    nxt_b = _next_occurrence_table(cb, sigma)
    inf = m + 1

    def feasible(symbols) -> bool:
        f = [0] * (n + 1)
        for c in symbols:
            g = [inf] * (n + 1)
            for i in range(n + 1):
                fj = f[i]
                if fj > m:
                    continue
                j2 = nxt_b[fj][c]       # color this symbol into B
                if j2 <= m and j2 < g[i]:
                    g[i] = j2
                i2 = nxt_a[i][c]        # or into A
                if i2 <= n and fj < g[i2]:
                    g[i2] = fj
            f = g
        return min(f) <= m

    for length in range(u, 0, -1):
        for idx in itertools.combinations(range(u), length):
            if feasible([cp[i] for i in idx]):
                return length
    return 0
