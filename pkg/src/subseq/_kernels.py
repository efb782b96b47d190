"""Compiled inner loops shared by the engines.

Everything here is a plain function over flat numpy arrays so numba can
compile it; orchestration, validation, and data preparation live in the
public modules. All kernels are cached to disk and release the GIL.
"""

import numpy as np
from numba import njit

JIT = dict(cache=True, nogil=True)


# ---------------------------------------------------------------------------
# classic DP baselines


@njit(**JIT)
def lcs_rows(a, b):
    n = a.shape[0]
    m = b.shape[0]
    prev = np.zeros(m + 1, np.int64)
    cur = np.zeros(m + 1, np.int64)
    for i in range(1, n + 1):
        ai = a[i - 1]
        cur[0] = 0
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                cur[j] = prev[j - 1] + 1
            else:
                v = prev[j]
                w = cur[j - 1]
                cur[j] = v if v >= w else w
        t = prev
        prev = cur
        cur = t
    return prev[m]


@njit(**JIT)
def lcs_fill(a, b, out):
    n = a.shape[0]
    m = b.shape[0]
    for j in range(m + 1):
        out[0, j] = 0
    for i in range(1, n + 1):
        out[i, 0] = 0
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                out[i, j] = out[i - 1, j - 1] + 1
            else:
                v = out[i - 1, j]
                w = out[i, j - 1]
                out[i, j] = v if v >= w else w


@njit(**JIT)
def edit_rows(a, b):
    n = a.shape[0]
    m = b.shape[0]
    prev = np.empty(m + 1, np.int64)
    cur = np.empty(m + 1, np.int64)
    for j in range(m + 1):
        prev[j] = j
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            v = prev[j - 1] + cost
            w = prev[j] + 1
            if w < v:
                v = w
            w = cur[j - 1] + 1
            if w < v:
                v = w
            cur[j] = v
        t = prev
        prev = cur
        cur = t
    return prev[m]


@njit(**JIT)
def edit_fill(a, b, out):
    n = a.shape[0]
    m = b.shape[0]
    for j in range(m + 1):
        out[0, j] = j
    for i in range(1, n + 1):
        out[i, 0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            v = out[i - 1, j - 1] + cost
            w = out[i - 1, j] + 1
            if w < v:
                v = w
            w = out[i, j - 1] + 1
            if w < v:
                v = w
            out[i, j] = v


@njit(**JIT)
def hs_scan(a, occ_off, occ_pos, m):
    # Threshold-list Hunt-Szymanski: thresh[k] = smallest 1-based end column
    # of a common subsequence of length k seen so far (strictly increasing).
    thresh = np.full(m + 2, m + 1, np.int64)
    thresh[0] = 0
    best = 0
    sigma = occ_off.shape[0] - 1
    for i in range(a.shape[0]):
        c = a[i]
        if c >= sigma:
            continue
        lo = occ_off[c]
        hi = occ_off[c + 1]
        # reverse column order so updates within one row cannot chain
        for t in range(hi - 1, lo - 1, -1):
            j = occ_pos[t] + 1
            lo_k = 1
            hi_k = best + 1
            while lo_k < hi_k:
                mid = (lo_k + hi_k) >> 1
                if thresh[mid] < j:
                    lo_k = mid + 1
                else:
                    hi_k = mid
            if thresh[lo_k] > j:
                thresh[lo_k] = j
                if lo_k > best:
                    best = lo_k
    return best


# ---------------------------------------------------------------------------
# merged LCS (three sequences)


@njit(**JIT)
def merlcs_planes(a, b, p):
    n = a.shape[0]
    m = b.shape[0]
    u = p.shape[0]
    prev = np.zeros((m + 1, u + 1), np.int64)
    cur = np.zeros((m + 1, u + 1), np.int64)
    # plane i=0 holds LCS(B prefix, P prefix)
    for j in range(1, m + 1):
        bj = b[j - 1]
        for k in range(1, u + 1):
            if bj == p[k - 1]:
                prev[j, k] = prev[j - 1, k - 1] + 1
            else:
                v = prev[j - 1, k]
                w = prev[j, k - 1]
                prev[j, k] = v if v >= w else w
    arow = np.zeros(u + 1, np.int64)  # M[i, 0, k] = LCS(A prefix, P prefix)
    for i in range(1, n + 1):
        ai = a[i - 1]
        last = 0
        for k in range(1, u + 1):
            keep = arow[k]
            if ai == p[k - 1]:
                arow[k] = last + 1
            elif arow[k - 1] > arow[k]:
                arow[k] = arow[k - 1]
            last = keep
        for k in range(u + 1):
            cur[0, k] = arow[k]
        for j in range(1, m + 1):
            bj = b[j - 1]
            cur[j, 0] = 0
            for k in range(1, u + 1):
                v = cur[j - 1, k]
                w = prev[j, k]
                if w > v:
                    v = w
                w = cur[j, k - 1]
                if w > v:
                    v = w
                if ai == p[k - 1]:
                    w = prev[j, k - 1] + 1
                    if w > v:
                        v = w
                if bj == p[k - 1]:
                    w = cur[j - 1, k - 1] + 1
                    if w > v:
                        v = w
                cur[j, k] = v
        t = prev
        prev = cur
        cur = t
    return prev[m, u]


@njit(**JIT)
def merlcs_fill(a, b, p, out):
    n = a.shape[0]
    m = b.shape[0]
    u = p.shape[0]
    for i in range(n + 1):
        for j in range(m + 1):
            out[i, j, 0] = 0
    for i in range(n + 1):
        for j in range(m + 1):
            for k in range(1, u + 1):
                v = out[i, j, k - 1]
                if i > 0:
                    w = out[i - 1, j, k]
                    if w > v:
                        v = w
                    if a[i - 1] == p[k - 1]:
                        w = out[i - 1, j, k - 1] + 1
                        if w > v:
                            v = w
                if j > 0:
                    w = out[i, j - 1, k]
                    if w > v:
                        v = w
                    if b[j - 1] == p[k - 1]:
                        w = out[i, j - 1, k - 1] + 1
                        if w > v:
                            v = w
                out[i, j, k] = v


# ---------------------------------------------------------------------------
# per-block match binning


@njit(**JIT)
def block_match_counts(a, occ_off, occ_pos, br, bc, nbj, counts):
    sigma = occ_off.shape[0] - 1
    for i0 in range(a.shape[0]):
        c = a[i0]
        if c >= sigma:
            continue
        base = (i0 // br) * nbj
        for t in range(occ_off[c], occ_off[c + 1]):
            counts[base + occ_pos[t] // bc] += 1


@njit(**JIT)
def block_match_fill(a, occ_off, occ_pos, br, bc, nbj, counts, cap,
                     offsets, cursor, coords):
    # second pass: store block-local packed coordinates, row-major per block,
    # skipping blocks whose total count exceeds cap
    sigma = occ_off.shape[0] - 1
    for i0 in range(a.shape[0]):
        c = a[i0]
        if c >= sigma:
            continue
        bi = i0 // br
        li = i0 - bi * br
        base = bi * nbj
        for t in range(occ_off[c], occ_off[c + 1]):
            j0 = occ_pos[t]
            g = base + j0 // bc
            if counts[g] <= cap:
                coords[offsets[g] + cursor[g]] = li * bc + (j0 - (j0 // bc) * bc)
                cursor[g] += 1


# ---------------------------------------------------------------------------
# stripe tabulation

# Block geometry: a block covers x1 input-A positions (horizontal) and x2
# input-B positions (vertical); borders are shared, so the working table is
# (x2+1) x (x1+1). Keys pack, low to high: left diffs (x2 fields), top diffs
# (x1 fields), A codes (x1 fields of cb bits). Diff fields are 1 bit wide and
# raw for subsequence scoring (db=1) or 2 bits wide storing d+1 for distance
# scoring (db=2). Values pack bottom diffs, right diffs, then the corner
# delta BR-UL (distance delta stored offset by x1+x2).


@njit(**JIT)
def tab_block_value(key, b_codes, x1, x2, cb, db, T):
    cmask = (np.int64(1) << cb) - 1
    if db == 1:
        T[0, 0] = 0
        for t in range(1, x1 + 1):
            T[0, t] = T[0, t - 1] + ((key >> (x2 + t - 1)) & 1)
        for s in range(1, x2 + 1):
            T[s, 0] = T[s - 1, 0] + ((key >> (s - 1)) & 1)
        cbase = x1 + x2
        for s in range(1, x2 + 1):
            bc = b_codes[s - 1]
            for t in range(1, x1 + 1):
                ac = (key >> (cbase + cb * (t - 1))) & cmask
                v = T[s - 1, t]
                if T[s, t - 1] > v:
                    v = T[s, t - 1]
                if ac == bc and T[s - 1, t - 1] + 1 > v:
                    v = T[s - 1, t - 1] + 1
                T[s, t] = v
        val = np.int64(0)
        for t in range(1, x1 + 1):
            val |= (T[x2, t] - T[x2, t - 1]) << (t - 1)
        for s in range(1, x2 + 1):
            val |= (T[s, x1] - T[s - 1, x1]) << (x1 + s - 1)
        val |= T[x2, x1] << (x1 + x2)
        return val
    T[0, 0] = 0
    for t in range(1, x1 + 1):
        T[0, t] = T[0, t - 1] + (((key >> (2 * x2 + 2 * (t - 1))) & 3) - 1)
    for s in range(1, x2 + 1):
        T[s, 0] = T[s - 1, 0] + (((key >> (2 * (s - 1))) & 3) - 1)
    cbase = 2 * (x1 + x2)
    for s in range(1, x2 + 1):
        bc = b_codes[s - 1]
        for t in range(1, x1 + 1):
            ac = (key >> (cbase + cb * (t - 1))) & cmask
            v = T[s - 1, t] + 1
            if T[s, t - 1] + 1 < v:
                v = T[s, t - 1] + 1
            d = T[s - 1, t - 1]
            if ac != bc:
                d += 1
            if d < v:
                v = d
            T[s, t] = v
    val = np.int64(0)
    for t in range(1, x1 + 1):
        val |= (T[x2, t] - T[x2, t - 1] + 1) << (2 * (t - 1))
    for s in range(1, x2 + 1):
        val |= (T[s, x1] - T[s - 1, x1] + 1) << (2 * x1 + 2 * (s - 1))
    val |= (T[x2, x1] + x1 + x2) << (2 * (x1 + x2))
    return val


@njit(**JIT)
def tab_edit_key_invalid(key, x1, x2):
    # a 2-bit diff field holding 3 decodes to +2, which no distance row allows
    for f in range(x1 + x2):
        if ((key >> (2 * f)) & 3) == 3:
            return True
    return False


@njit(**JIT)
def tab_build_lut(b_codes, x1, x2, cb, db):
    key_bits = db * (x1 + x2) + cb * x1
    size = np.int64(1) << key_bits
    out = np.empty(size, np.int64)
    T = np.empty((x2 + 1, x1 + 1), np.int64)
    for key in range(size):
        k = np.int64(key)
        if db == 2 and tab_edit_key_invalid(k, x1, x2):
            out[key] = -1
        else:
            out[key] = tab_block_value(k, b_codes, x1, x2, cb, db, T)
    return out


@njit(**JIT)
def tab_stripe_scan(a_codes, n_full, b_codes, top, stripe_id,
                    lut_val, lut_stamp, x1, x2, cb, db, left0, T):
    """Run the full blocks of one stripe through the stamped table.

    top carries the running row of border diffs and is rewritten in place
    over [0, n_full). Returns the number of entries filled on miss and the
    packed right border of the last block (the left input of the ragged
    column tail).
    """
    built = 0
    left = left0
    code_base = db * (x1 + x2)
    for t0 in range(0, n_full, x1):
        key = left
        if db == 1:
            for t in range(x1):
                key |= np.int64(top[t0 + t]) << (x2 + t)
        else:
            for t in range(x1):
                key |= np.int64(top[t0 + t] + 1) << (2 * x2 + 2 * t)
        for t in range(x1):
            key |= a_codes[t0 + t] << (code_base + cb * t)
        if lut_stamp[key] != stripe_id:
            lut_val[key] = tab_block_value(key, b_codes, x1, x2, cb, db, T)
            lut_stamp[key] = stripe_id
            built += 1
        val = lut_val[key]
        if db == 1:
            for t in range(x1):
                top[t0 + t] = np.int8((val >> t) & 1)
            left = (val >> x1) & ((np.int64(1) << x2) - 1)
        else:
            for t in range(x1):
                top[t0 + t] = np.int8(((val >> (2 * t)) & 3) - 1)
            left = (val >> (2 * x1)) & ((np.int64(1) << (2 * x2)) - 1)
    return built, left


@njit(**JIT)
def tab_ragged_cols(a_codes_tail, b_codes, top_tail, left_packed,
                    x2, db, row0, row1):
    # direct fill of the partial blocks right of the last full column
    tail = a_codes_tail.shape[0]
    row0[0] = 0
    for t in range(1, tail + 1):
        row0[t] = row0[t - 1] + top_tail[t - 1]
    prev = row0
    cur = row1
    lv = np.int64(0)
    for s in range(1, x2 + 1):
        if db == 1:
            lv += (left_packed >> (s - 1)) & 1
        else:
            lv += ((left_packed >> (2 * (s - 1))) & 3) - 1
        cur[0] = lv
        bc = b_codes[s - 1]
        if db == 1:
            for t in range(1, tail + 1):
                v = prev[t]
                if cur[t - 1] > v:
                    v = cur[t - 1]
                if a_codes_tail[t - 1] == bc and prev[t - 1] + 1 > v:
                    v = prev[t - 1] + 1
                cur[t] = v
        else:
            for t in range(1, tail + 1):
                v = prev[t] + 1
                if cur[t - 1] + 1 < v:
                    v = cur[t - 1] + 1
                d = prev[t - 1]
                if a_codes_tail[t - 1] != bc:
                    d += 1
                if d < v:
                    v = d
                cur[t] = v
        tmp = prev
        prev = cur
        cur = tmp
    for t in range(1, tail + 1):
        top_tail[t - 1] = np.int8(prev[t] - prev[t - 1])


@njit(**JIT)
def tab_ragged_rows(a, b_tail, top, db, row0, row1):
    # direct fill of the short stripe left over below the last full one
    n = a.shape[0]
    mt = b_tail.shape[0]
    row0[0] = 0
    for t in range(1, n + 1):
        row0[t] = row0[t - 1] + top[t - 1]
    prev = row0
    cur = row1
    for s in range(1, mt + 1):
        cur[0] = np.int64(s) if db == 2 else np.int64(0)
        bs = b_tail[s - 1]
        if db == 1:
            for t in range(1, n + 1):
                v = prev[t]
                if cur[t - 1] > v:
                    v = cur[t - 1]
                if a[t - 1] == bs and prev[t - 1] + 1 > v:
                    v = prev[t - 1] + 1
                cur[t] = v
        else:
            for t in range(1, n + 1):
                v = prev[t] + 1
                if cur[t - 1] + 1 < v:
                    v = cur[t - 1] + 1
                d = prev[t - 1]
                if a[t - 1] != bs:
                    d += 1
                if d < v:
                    v = d
                cur[t] = v
        tmp = prev
        prev = cur
        cur = tmp
    for t in range(1, n + 1):
        top[t - 1] = np.int8(prev[t] - prev[t - 1])


# ---------------------------------------------------------------------------
# sparse / dense hybrid

# Blocks are b x b. Sparse keys pack, low to high: top diffs (b fields),
# left diffs (b fields), the match count, then one field of
# ceil(log2(b*b)) bits per stored match holding (li-1)*b + (lj-1) for a
# match at block-local (li, lj), li along A and lj along B, ascending.
# Values reuse the stripe layout with x1 = x2 = b, so the keys carry no
# symbols at all and one table serves every input.


@njit(**JIT)
def hyb_block_value(key, bside, db, count_bits, coord_bits, T):
    if db == 1:
        T[0, 0] = 0
        for t in range(1, bside + 1):
            T[0, t] = T[0, t - 1] + ((key >> (t - 1)) & 1)
        for s in range(1, bside + 1):
            T[s, 0] = T[s - 1, 0] + ((key >> (bside + s - 1)) & 1)
    else:
        T[0, 0] = 0
        for t in range(1, bside + 1):
            T[0, t] = T[0, t - 1] + (((key >> (2 * (t - 1))) & 3) - 1)
        for s in range(1, bside + 1):
            T[s, 0] = T[s - 1, 0] + (((key >> (2 * bside + 2 * (s - 1))) & 3) - 1)
    cbase = 2 * db * bside
    count = (key >> cbase) & ((np.int64(1) << count_bits) - 1)
    pbase = cbase + count_bits
    cmask = (np.int64(1) << coord_bits) - 1
    for s in range(1, bside + 1):
        for t in range(1, bside + 1):
            cell = (t - 1) * bside + (s - 1)
            hit = False
            for q in range(count):
                if ((key >> (pbase + q * coord_bits)) & cmask) == cell:
                    hit = True
                    break
            if db == 1:
                v = T[s - 1, t]
                if T[s, t - 1] > v:
                    v = T[s, t - 1]
                if hit and T[s - 1, t - 1] + 1 > v:
                    v = T[s - 1, t - 1] + 1
                T[s, t] = v
            else:
                v = T[s - 1, t] + 1
                if T[s, t - 1] + 1 < v:
                    v = T[s, t - 1] + 1
                d = T[s - 1, t - 1]
                if not hit:
                    d += 1
                if d < v:
                    v = d
                T[s, t] = v
    val = np.int64(0)
    if db == 1:
        for t in range(1, bside + 1):
            val |= (T[bside, t] - T[bside, t - 1]) << (t - 1)
        for s in range(1, bside + 1):
            val |= (T[s, bside] - T[s - 1, bside]) << (bside + s - 1)
        val |= T[bside, bside] << (2 * bside)
    else:
        for t in range(1, bside + 1):
            val |= (T[bside, t] - T[bside, t - 1] + 1) << (2 * (t - 1))
        for s in range(1, bside + 1):
            val |= (T[s, bside] - T[s - 1, bside] + 1) << (2 * (bside + s - 1))
        val |= (T[bside, bside] + 2 * bside) << (4 * bside)
    return val


@njit(**JIT)
def hyb_key_invalid(key, bside, kcap, db, count_bits, coord_bits):
    # border fields must decode to real diffs, the count must respect the
    # threshold, coordinates must ascend strictly inside the grid, and
    # unused coordinate slots must be zero
    if db == 2:
        for f in range(2 * bside):
            if ((key >> (2 * f)) & 3) == 3:
                return True
    cbase = 2 * db * bside
    count = (key >> cbase) & ((np.int64(1) << count_bits) - 1)
    if count > kcap:
        return True
    pbase = cbase + count_bits
    cmask = (np.int64(1) << coord_bits) - 1
    cells = bside * bside
    prev = np.int64(-1)
    for q in range(kcap):
        f = (key >> (pbase + q * coord_bits)) & cmask
        if q < count:
            if f <= prev or f >= cells:
                return True
            prev = f
        elif f != 0:
            return True
    return False


@njit(**JIT)
def hyb_build_lut(bside, kcap, db, count_bits, coord_bits, entries, T):
    filled = 0
    for key in range(entries.shape[0]):
        k = np.int64(key)
        if hyb_key_invalid(k, bside, kcap, db, count_bits, coord_bits):
            continue
        entries[key] = hyb_block_value(k, bside, db, count_bits, coord_bits, T)
        filled += 1
    return filled


@njit(**JIT)
def hyb_dense_direct(a, bseq, t0, width, s0, rows, db, top, left, row0, row1):
    """Direct DP over one rectangle of the grid.

    Rewrites top[t0:t0+width] in place and returns the packed right
    border (rows diff fields). left packs the input left border the same
    way.
    """
    row0[0] = 0
    for t in range(1, width + 1):
        row0[t] = row0[t - 1] + top[t0 + t - 1]
    prev = row0
    cur = row1
    lv = np.int64(0)
    newleft = np.int64(0)
    for s in range(1, rows + 1):
        if db == 1:
            lv += (left >> (s - 1)) & 1
        else:
            lv += ((left >> (2 * (s - 1))) & 3) - 1
        cur[0] = lv
        bs = bseq[s0 + s - 1]
        if db == 1:
            for t in range(1, width + 1):
                v = prev[t]
                if cur[t - 1] > v:
                    v = cur[t - 1]
                if a[t0 + t - 1] == bs and prev[t - 1] + 1 > v:
                    v = prev[t - 1] + 1
                cur[t] = v
        else:
            for t in range(1, width + 1):
                v = prev[t] + 1
                if cur[t - 1] + 1 < v:
                    v = cur[t - 1] + 1
                d = prev[t - 1]
                if a[t0 + t - 1] != bs:
                    d += 1
                if d < v:
                    v = d
                cur[t] = v
        if db == 1:
            newleft |= (cur[width] - prev[width]) << (s - 1)
        else:
            newleft |= (cur[width] - prev[width] + 1) << (2 * (s - 1))
        tmp = prev
        prev = cur
        cur = tmp
    for t in range(1, width + 1):
        top[t0 + t - 1] = np.int8(prev[t] - prev[t - 1])
    return newleft


@njit(**JIT)
def hyb_stripe_codes(bseq, s0, bside, bsort, bcodes):
    # sort the stripe's row symbols, dedupe, and code each row against
    # the result; bside is small so insertion sort is fine
    for s in range(bside):
        bsort[s] = bseq[s0 + s]
    for s in range(1, bside):
        v = bsort[s]
        t = s - 1
        while t >= 0 and bsort[t] > v:
            bsort[t + 1] = bsort[t]
            t -= 1
        bsort[t + 1] = v
    q = 0
    for s in range(bside):
        if q == 0 or bsort[s] != bsort[q - 1]:
            bsort[q] = bsort[s]
            q += 1
    for s in range(bside):
        sym = bseq[s0 + s]
        lo = 0
        hi = q - 1
        while lo < hi:
            mid = (lo + hi) >> 1
            if bsort[mid] < sym:
                lo = mid + 1
            else:
                hi = mid
        bcodes[s] = lo
    return q


@njit(**JIT)
def hyb_code_of(bsort, q, sym):
    lo = 0
    hi = q
    while lo < hi:
        mid = (lo + hi) >> 1
        if bsort[mid] < sym:
            lo = mid + 1
        else:
            hi = mid
    if lo < q and bsort[lo] == sym:
        return lo
    return np.int64(q)


@njit(**JIT)
def hyb_dense_section3(a, bseq, t0, s0, bside, db, top, left,
                       slut_val, slut_stamp, stamp, x1p, cbp,
                       bsort, q, bcodes, acodes, Tsub, row0, row1):
    """One dense block via the stamped stripe table.

    The block is cut into x1p-wide sub-blocks spanning its full height;
    keys code symbols against the stripe's own row alphabet (bsort[:q],
    bcodes), so entries are shared by every dense block of the stripe.
    Returns the packed right border and the number of entries filled.
    """
    fills = 0
    subleft = left
    code_base = db * (x1p + bside)
    nfull = (bside // x1p) * x1p
    for u0 in range(t0, t0 + nfull, x1p):
        for t in range(x1p):
            acodes[t] = hyb_code_of(bsort, q, a[u0 + t])
        key = subleft
        if db == 1:
            for t in range(x1p):
                key |= np.int64(top[u0 + t]) << (bside + t)
        else:
            for t in range(x1p):
                key |= np.int64(top[u0 + t] + 1) << (2 * bside + 2 * t)
        for t in range(x1p):
            key |= acodes[t] << (code_base + cbp * t)
        if slut_stamp[key] != stamp:
            slut_val[key] = tab_block_value(key, bcodes, x1p, bside, cbp,
                                            db, Tsub)
            slut_stamp[key] = stamp
            fills += 1
        val = slut_val[key]
        if db == 1:
            for t in range(x1p):
                top[u0 + t] = np.int8((val >> t) & 1)
            subleft = (val >> x1p) & ((np.int64(1) << bside) - 1)
        else:
            for t in range(x1p):
                top[u0 + t] = np.int8(((val >> (2 * t)) & 3) - 1)
            subleft = (val >> (2 * x1p)) & ((np.int64(1) << (2 * bside)) - 1)
    if nfull < bside:
        subleft = hyb_dense_direct(a, bseq, t0 + nfull, bside - nfull,
                                   s0, bside, db, top, subleft, row0, row1)
    return subleft, fills


@njit(**JIT)
def hyb_scan(a, bseq, bside, kcap, db, counts, offsets, coords, nbj,
             count_bits, coord_bits, glut, gseen, strategy,
             slut_val, slut_stamp, x1p, cbp,
             top, row0, row1, T, Tsub, bsort, bcodes, acodes):
    """Full hybrid pass: sparse blocks by table, dense blocks by strategy.

    strategy 0 fills dense blocks directly, 1 routes them through the
    stripe table. glut entries start at -1 and are filled on first use
    (packed values are never negative); gseen is a per-run scratch that
    makes the reported entry count the number of distinct keys this run
    needs, independent of how warm the shared table already is. Returns
    the sparse lookup count, dense block count, and entry counts for the
    shared and stripe tables.
    """
    n = a.shape[0]
    m = bseq.shape[0]
    nbi = n // bside
    mbj = m // bside
    n_full = nbi * bside
    sparse_cnt = np.int64(0)
    dense_cnt = np.int64(0)
    gfills = np.int64(0)
    sfills = np.int64(0)
    cbase = 2 * db * bside
    pbase = cbase + count_bits
    left0 = np.int64(0)
    if db == 2:
        for s in range(bside):
            left0 |= np.int64(2) << (2 * s)
    for bj in range(mbj):
        s0 = bj * bside
        left = left0
        q = np.int64(-1)
        for bi in range(nbi):
            t0 = bi * bside
            g = bi * nbj + bj
            c = counts[g]
            if c <= kcap:
                sparse_cnt += 1
                key = np.int64(0)
                if db == 1:
                    for t in range(bside):
                        key |= np.int64(top[t0 + t]) << t
                else:
                    for t in range(bside):
                        key |= np.int64(top[t0 + t] + 1) << (2 * t)
                key |= left << (db * bside)
                key |= c << cbase
                off = offsets[g]
                for w in range(c):
                    key |= np.int64(coords[off + w]) << (pbase + w * coord_bits)
                if glut[key] == -1:
                    glut[key] = hyb_block_value(key, bside, db, count_bits,
                                                coord_bits, T)
                if gseen[key] == 0:
                    gseen[key] = 1
                    gfills += 1
                val = glut[key]
                if db == 1:
                    for t in range(bside):
                        top[t0 + t] = np.int8((val >> t) & 1)
                    left = (val >> bside) & ((np.int64(1) << bside) - 1)
                else:
                    for t in range(bside):
                        top[t0 + t] = np.int8(((val >> (2 * t)) & 3) - 1)
                    left = ((val >> (2 * bside))
                            & ((np.int64(1) << (2 * bside)) - 1))
            else:
                dense_cnt += 1
                if strategy == 0:
                    left = hyb_dense_direct(a, bseq, t0, bside, s0, bside,
                                            db, top, left, row0, row1)
                else:
                    if q < 0:
                        q = hyb_stripe_codes(bseq, s0, bside, bsort, bcodes)
                    left, nf = hyb_dense_section3(
                        a, bseq, t0, s0, bside, db, top, left,
                        slut_val, slut_stamp, bj + 1, x1p, cbp,
                        bsort, q, bcodes, acodes, Tsub, row0, row1)
                    sfills += nf
        if n_full < n:
            hyb_dense_direct(a, bseq, n_full, n - n_full, s0, bside,
                             db, top, left, row0, row1)
    mt = m - mbj * bside
    if mt > 0:
        leftb = np.int64(0)
        if db == 2:
            for s in range(mt):
                leftb |= np.int64(2) << (2 * s)
        hyb_dense_direct(a, bseq, 0, n, mbj * bside, mt,
                         db, top, leftb, row0, row1)
    return sparse_cnt, dense_cnt, gfills, sfills


# ---------------------------------------------------------------------------
# cube tabulation for the three-sequence merge
#
# The merged-subsequence grid M is filled in b x b x b cubes. A cube's state
# is its three incoming faces (i, j and k constant), stored relative to the
# anchor corner as one bit per cell: the three anchor edges first, then each
# face as differentials along its first varying axis. Together with the
# slab's remapped symbols this determines the three outgoing faces, so the
# transition is memoized in a per-column table (keys and values are the
# packed layouts below). Axis differentials of the merged grid are always in
# {0, 1}, which is what makes the one-bit packing lossless.


@njit(**JIT)
def cube_boundary_planes(a, bseq, p, M):
    n = a.shape[0]
    m = bseq.shape[0]
    u = p.shape[0]
    for i in range(n + 1):
        for j in range(m + 1):
            M[i, j, 0] = 0
    for k in range(u + 1):
        M[0, 0, k] = 0
    # plane i=0: common-subsequence table of (B, P)
    for j in range(1, m + 1):
        bj = bseq[j - 1]
        for k in range(1, u + 1):
            v = M[0, j - 1, k]
            w = M[0, j, k - 1]
            if w > v:
                v = w
            if bj == p[k - 1]:
                w = M[0, j - 1, k - 1] + 1
                if w > v:
                    v = w
            M[0, j, k] = v
    # plane j=0: common-subsequence table of (A, P)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for k in range(1, u + 1):
            v = M[i - 1, 0, k]
            w = M[i, 0, k - 1]
            if w > v:
                v = w
            if ai == p[k - 1]:
                w = M[i - 1, 0, k - 1] + 1
                if w > v:
                    v = w
            M[i, 0, k] = v


@njit(**JIT)
def cube_column(a, bseq, p, M, i0, j0, bside, cb, table):
    """Fill one bside x bside x u column of cubes; returns entries added.

    The caller clears `table` when moving to a new column. Key layout, low
    to high: slab codes (cb bits each), the three anchor edges (i, j, k
    runs of bside bits), then the incoming i, j, k faces (bside^2 bits
    each). Values pack the outgoing faces in the same face order.
    """
    b = bside
    u = p.shape[0]
    ub = u // b
    # the column alphabet: sorted distinct symbols of the two blocks
    buf = np.empty(2 * b, np.int64)
    for x in range(b):
        buf[x] = a[i0 + x]
    for y in range(b):
        buf[b + y] = bseq[j0 + y]
    for x in range(1, 2 * b):
        v = buf[x]
        y = x - 1
        while y >= 0 and buf[y] > v:
            buf[y + 1] = buf[y]
            y -= 1
        buf[y + 1] = v
    q = 0
    for x in range(2 * b):
        if q == 0 or buf[x] != buf[q - 1]:
            buf[q] = buf[x]
            q += 1

    fills = 0
    for K in range(ub):
        k0 = K * b
        key = np.int64(0)
        for z in range(b):
            sym = p[k0 + z]
            lo = 0
            hi = q
            while lo < hi:
                mid = (lo + hi) >> 1
                if buf[mid] < sym:
                    lo = mid + 1
                else:
                    hi = mid
            c = lo if (lo < q and buf[lo] == sym) else q
            key |= np.int64(c) << (cb * z)
        pos = cb * b
        for x in range(1, b + 1):
            key |= np.int64(M[i0 + x, j0, k0] - M[i0 + x - 1, j0, k0]) << pos
            pos += 1
        for y in range(1, b + 1):
            key |= np.int64(M[i0, j0 + y, k0] - M[i0, j0 + y - 1, k0]) << pos
            pos += 1
        for z in range(1, b + 1):
            key |= np.int64(M[i0, j0, k0 + z] - M[i0, j0, k0 + z - 1]) << pos
            pos += 1
        for y in range(1, b + 1):
            for z in range(1, b + 1):
                key |= np.int64(M[i0, j0 + y, k0 + z]
                                - M[i0, j0 + y - 1, k0 + z]) << pos
                pos += 1
        for x in range(1, b + 1):
            for z in range(1, b + 1):
                key |= np.int64(M[i0 + x, j0, k0 + z]
                                - M[i0 + x - 1, j0, k0 + z]) << pos
                pos += 1
        for x in range(1, b + 1):
            for y in range(1, b + 1):
                key |= np.int64(M[i0 + x, j0 + y, k0]
                                - M[i0 + x - 1, j0 + y, k0]) << pos
                pos += 1

        if key in table:
            val = table[key]
            pos = 0
            for y in range(1, b + 1):
                for z in range(1, b + 1):
                    M[i0 + b, j0 + y, k0 + z] = (M[i0 + b, j0 + y - 1, k0 + z]
                                                 + np.int16((val >> pos) & 1))
                    pos += 1
            for x in range(1, b + 1):
                for z in range(1, b + 1):
                    M[i0 + x, j0 + b, k0 + z] = (M[i0 + x - 1, j0 + b, k0 + z]
                                                 + np.int16((val >> pos) & 1))
                    pos += 1
            for x in range(1, b + 1):
                for y in range(1, b + 1):
                    M[i0 + x, j0 + y, k0 + b] = (M[i0 + x - 1, j0 + y, k0 + b]
                                                 + np.int16((val >> pos) & 1))
                    pos += 1
        else:
            for z in range(1, b + 1):
                pk = p[k0 + z - 1]
                for x in range(1, b + 1):
                    am = a[i0 + x - 1] == pk
                    for y in range(1, b + 1):
                        i = i0 + x
                        j = j0 + y
                        k = k0 + z
                        v = M[i, j, k - 1]
                        w = M[i - 1, j, k]
                        if w > v:
                            v = w
                        if am:
                            w = M[i - 1, j, k - 1] + 1
                            if w > v:
                                v = w
                        w = M[i, j - 1, k]
                        if w > v:
                            v = w
                        if bseq[j - 1] == pk:
                            w = M[i, j - 1, k - 1] + 1
                            if w > v:
                                v = w
                        M[i, j, k] = v
            val = np.int64(0)
            pos = 0
            for y in range(1, b + 1):
                for z in range(1, b + 1):
                    val |= np.int64(M[i0 + b, j0 + y, k0 + z]
                                    - M[i0 + b, j0 + y - 1, k0 + z]) << pos
                    pos += 1
            for x in range(1, b + 1):
                for z in range(1, b + 1):
                    val |= np.int64(M[i0 + x, j0 + b, k0 + z]
                                    - M[i0 + x - 1, j0 + b, k0 + z]) << pos
                    pos += 1
            for x in range(1, b + 1):
                for y in range(1, b + 1):
                    val |= np.int64(M[i0 + x, j0 + y, k0 + b]
                                    - M[i0 + x - 1, j0 + y, k0 + b]) << pos
                    pos += 1
            table[key] = val
            fills += 1
    return fills


@njit(**JIT)
def cube_ragged(a, bseq, p, M, i_full, j_full, k_full):
    """Direct recurrence over every cell outside the full-cube region.

    Sweeps in ascending (i, j, k); cells inside the cube region read only
    its closing planes i_full / j_full / k_full, which the cubes wrote
    completely. Returns the number of cells visited.
    """
    n = a.shape[0]
    m = bseq.shape[0]
    u = p.shape[0]
    cells = 0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            kstart = k_full + 1 if (i <= i_full and j <= j_full) else 1
            for k in range(kstart, u + 1):
                pk = p[k - 1]
                v = M[i, j, k - 1]
                w = M[i - 1, j, k]
                if w > v:
                    v = w
                if a[i - 1] == pk:
                    w = M[i - 1, j, k - 1] + 1
                    if w > v:
                        v = w
                w = M[i, j - 1, k]
                if w > v:
                    v = w
                if bseq[j - 1] == pk:
                    w = M[i, j - 1, k - 1] + 1
                    if w > v:
                        v = w
                M[i, j, k] = v
                cells += 1
    return cells
