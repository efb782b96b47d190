"""Edit distance engines, transposition planning, and the cube engine."""

import numpy as np
import pytest

from subseq import (
    CubeLut,
    EditBlockIo,
    ParameterError,
    SizeGuardError,
    TabulationParams,
    TranspositionPlan,
    build_stripe_lut,
    default_transposition_tau,
    edit_distance_hybrid,
    edit_distance_hybrid_stats,
    edit_distance_naive,
    edit_distance_tabulated,
    edit_distance_tabulated_stats,
    lcs_naive,
    lcts,
    merlcs_bruteforce,
    merlcs_matrix,
    merlcs_naive,
    merlcs_tabulated,
    merlcs_tabulated_stats,
    plan_transpositions,
    unpack_stripe_value,
)

from conftest import random_pair, rng_for


def edit_block_dp(top, left, a_codes, b_codes):
    """Distance-mode block DP on code equality; returns walls and delta."""
    x1, x2 = len(top), len(left)
    T = [[0] * (x1 + 1) for _ in range(x2 + 1)]
    for t in range(1, x1 + 1):
        T[0][t] = T[0][t - 1] + top[t - 1]
    for s in range(1, x2 + 1):
        T[s][0] = T[s - 1][0] + left[s - 1]
        for t in range(1, x1 + 1):
            cost = 0 if a_codes[t - 1] == b_codes[s - 1] else 1
            T[s][t] = min(T[s - 1][t] + 1, T[s][t - 1] + 1,
                          T[s - 1][t - 1] + cost)
    bottom = [T[x2][t] - T[x2][t - 1] for t in range(1, x1 + 1)]
    right = [T[s][x1] - T[s - 1][x1] for s in range(1, x2 + 1)]
    return bottom, right, T[x2][x1] - T[0][0]


# ---------------------------------------------------------------------------
# distance-mode block borders


def test_edit_block_io_accepts_negative_borders():
    io = EditBlockIo(top_diffs=[-1, 1], left_diffs=[0, -1], a_codes=[0, 2])
    assert io.top_diffs.tolist() == [-1, 1]
    assert io.diff_bits == 2
    with pytest.raises(ParameterError):
        EditBlockIo(top_diffs=[-2, 0], left_diffs=[0, 0], a_codes=[0, 0])


def test_edit_block_io_lookup_routes():
    params = TabulationParams(y=2, x1=2, x2=2, key_budget_bits=64)
    lut2 = build_stripe_lut([0, 1], params, diff_bits=2)
    io = EditBlockIo(top_diffs=[-1, 1], left_diffs=[0, -1], a_codes=[0, 2])
    got = lut2.lookup(io)
    want = edit_block_dp([-1, 1], [0, -1], [0, 2], [0, 1])
    assert (list(got[0]), list(got[1]), got[2]) == want
    lut1 = build_stripe_lut([0, 1], params, diff_bits=1)
    with pytest.raises(ParameterError):
        lut1.lookup(io)


def test_edit_corner_delta_range():
    # the achievable delta range is [-(x1-x2), max(x1, x2)] in magnitude of
    # the side difference; rectangular blocks exceed +-min(x1, x2)
    for x1, x2 in [(1, 2), (1, 3), (2, 2), (2, 3)]:
        params = TabulationParams(y=x2, x1=x1, x2=x2, key_budget_bits=64)
        lut = build_stripe_lut(list(range(x2)), params, diff_bits=2)
        lo = hi = 0
        for key in range(lut.entries.shape[0]):
            packed = int(lut.entries[key])
            if packed < 0:
                continue
            _, _, delta = unpack_stripe_value(packed, x1, x2, 2)
            lo = min(lo, delta)
            hi = max(hi, delta)
        assert lo == -abs(x1 - x2)
        assert hi == max(x1, x2)
        if x1 != x2:
            assert hi > min(x1, x2)


# ---------------------------------------------------------------------------
# edit distance engines


def test_edit_tabulated_frozen():
    assert edit_distance_tabulated("kitten", "sitting") == 3
    assert edit_distance_tabulated("", "abc") == 3
    assert edit_distance_tabulated("abcd", "") == 4
    assert edit_distance_tabulated("", "") == 0


def test_edit_hybrid_frozen():
    assert edit_distance_hybrid("kitten", "sitting") == 3
    assert edit_distance_hybrid([0] * 7, [1] * 4) == 7
    assert edit_distance_hybrid("", "abc") == 3
    assert edit_distance_hybrid("xyz", "xyz") == 0


def test_edit_tabulated_matches_reference():
    rng = rng_for(501)
    for _ in range(120):
        a, b = random_pair(rng, max_n=70, max_m=70,
                           sigma=int(rng.choice([2, 4, 16, 200])))
        assert edit_distance_tabulated(a, b) == edit_distance_naive(a, b)


def test_edit_tabulated_explicit_params():
    rng = rng_for(502)
    params = TabulationParams(y=4, x1=2, x2=2, key_budget_bits=64)
    for _ in range(40):
        a, b = random_pair(rng, max_n=40, max_m=40, sigma=5)
        assert edit_distance_tabulated(a, b, params) == edit_distance_naive(a, b)
    _, stats = edit_distance_tabulated_stats(
        rng.integers(0, 4, 60), rng.integers(0, 4, 60), params)
    assert stats.lut_allocations == 1
    assert stats.blocks > 0


@pytest.mark.parametrize("strategy", ["section3", "direct_dp"])
def test_edit_hybrid_matches_reference(strategy):
    rng = rng_for(503)
    for _ in range(100):
        a, b = random_pair(rng, max_n=60, max_m=60,
                           sigma=int(rng.choice([2, 4, 16])))
        want = edit_distance_naive(a, b)
        assert edit_distance_hybrid(a, b, dense_strategy=strategy) == want


def test_edit_hybrid_stats_census():
    rng = rng_for(504)
    a = rng.integers(0, 3, 40)
    b = rng.integers(0, 3, 40)
    value, stats = edit_distance_hybrid_stats(a, b)
    assert value == edit_distance_naive(a, b)
    assert stats.sparse_lookups + stats.dense_blocks > 0
    assert stats.extra["r"] > 0


# ---------------------------------------------------------------------------
# transposition planning


def test_plan_frozen_example():
    plan = plan_transpositions([0, 1], [1, 0], 2)
    assert plan.counts.tolist() == [1, 2, 1]
    assert (plan.r(-1), plan.r(0), plan.r(1)) == (1, 2, 1)
    assert list(plan.transpositions) == [-1, 0, 1]


def test_plan_counts_partition_grid():
    rng = rng_for(505)
    for _ in range(60):
        sigma = int(rng.choice([2, 5, 17]))
        a, b = random_pair(rng, max_n=50, max_m=50, sigma=sigma)
        plan = plan_transpositions(a, b, sigma)
        assert int(plan.counts.sum()) == len(a) * len(b)
        t = int(rng.integers(-sigma + 1, sigma))
        direct = sum(1 for x in a for y in b if int(y) - int(x) == t)
        assert plan.r(t) == direct


def test_plan_routing_threshold():
    plan = plan_transpositions([0, 1], [1, 0], 2, tau=2.0)
    assert plan.route(0) == "tabulated"  # r=2 meets tau exactly
    assert plan.route(1) == "hybrid"
    assert plan.routing == {-1: "hybrid", 0: "tabulated", 1: "hybrid"}
    assert plan.tau == 2.0


def test_plan_validation():
    with pytest.raises(ParameterError):
        plan_transpositions([0, 3], [0, 1], 3)  # symbol == sigma
    with pytest.raises(ParameterError):
        plan_transpositions([0], [0], 0)
    with pytest.raises(ParameterError):
        TranspositionPlan(n=2, m=2, sigma=2, counts=[1, 1, 1], tau=0.0)
    with pytest.raises(ParameterError):
        TranspositionPlan(n=1, m=1, sigma=2, counts=[1], tau=0.0)
    with pytest.raises(ParameterError):
        plan_transpositions([0], [0], 1).r(1)


def test_default_tau_scales():
    assert default_transposition_tau(0, 0, 4) == 0.0
    # loglog(256) = 3, so 100*100*3/4
    assert default_transposition_tau(100, 256, 4) == pytest.approx(
        100 * 256 * np.log2(8.0) / 4)


# ---------------------------------------------------------------------------
# transposition-invariant common subsequence


def test_lcts_frozen_examples():
    assert lcts([0, 1, 2], [5, 6, 7], 8) == 3
    assert lcts([1], [3], 4) == 1
    assert lcts([2, 3, 2, 1], [2, 3, 2, 1], 4) == 4
    assert lcts([], [1, 2], 4) == 0
    assert lcts([1, 2], [], 4) == 0


def lcts_reference(a, b, sigma):
    best = 0
    for t in range(-sigma + 1, sigma):
        if t >= 0:
            best = max(best, lcs_naive([int(x) + t for x in a], b))
        else:
            best = max(best, lcs_naive(a, [int(x) - t for x in b]))
    return best


@pytest.mark.parametrize("mode", ["auto", "all_tabulated", "all_naive"])
def test_lcts_modes_agree(mode):
    rng = rng_for(506)
    for _ in range(25):
        sigma = int(rng.choice([4, 8, 16]))
        a, b = random_pair(rng, max_n=45, max_m=45, sigma=sigma)
        assert lcts(a, b, sigma, mode) == lcts_reference(a, b, sigma)


def test_lcts_workers_match_serial():
    rng = rng_for(507)
    for _ in range(8):
        a, b = random_pair(rng, min_n=5, min_m=5, max_n=50, max_m=50, sigma=8)
        assert lcts(a, b, 8, workers=3) == lcts_reference(a, b, 8)


def test_lcts_validation():
    with pytest.raises(ParameterError):
        lcts([0], [0], 2, "sometimes")
    with pytest.raises(ParameterError):
        lcts([0], [0], 0)
    with pytest.raises(ParameterError):
        lcts([5], [0], 4)  # symbol outside [0, sigma)


def test_lcts_routes_both_engines():
    # r_0 = 1600 sits above tau (~1153), the other shifts sit below it
    a = np.array([0] * 40 + [1] * 20)
    b = np.array([0] * 40 + [5] * 20)
    plan = plan_transpositions(a, b, 8)
    routes = set(plan.routing.values())
    assert routes == {"tabulated", "hybrid"}
    assert plan.route(0) == "tabulated"
    assert lcts(a, b, 8) == lcts_reference(a, b, 8) == 40


# ---------------------------------------------------------------------------
# cube tables and the merged-subsequence engine


def test_cube_lut_geometry():
    assert CubeLut(b=1).key_bits == 8
    assert CubeLut(b=2).key_bits == 24
    assert CubeLut(b=3).key_bits == 45
    assert CubeLut(b=2).value_bits == 12
    assert CubeLut(b=3).value_bits == 27
    assert CubeLut(b=2).code_bits == 3


def test_cube_lut_rejects_over_budget():
    with pytest.raises(ParameterError):
        CubeLut(b=4)  # 76 bits > the 64-bit word budget
    with pytest.raises(ParameterError):
        CubeLut(b=3, key_budget_bits=30)
    with pytest.raises(ParameterError):
        CubeLut(b=0)
    with pytest.raises(ParameterError):
        CubeLut(b=2, code_bits=1)


def test_cube_lut_table_roundtrip():
    table = CubeLut(b=2).new_table()
    table[np.int64(5)] = np.int64(9)
    assert table[np.int64(5)] == 9
    table.clear()
    assert len(table) == 0


def test_merlcs_frozen():
    assert merlcs_tabulated("ab", "cd", "") == 0
    assert merlcs_tabulated("", "", "xyz") == 0
    assert merlcs_tabulated("ace", "bdf", "abcdef") == 6
    with pytest.raises(ParameterError):
        merlcs_tabulated("ab", "cd", "ef", cube_b=4)


@pytest.mark.parametrize("cube_b", [1, 2, 3])
def test_merlcs_matches_reference(cube_b):
    rng = rng_for(509)
    for _ in range(60):
        sigma = int(rng.choice([2, 4, 8]))
        n, m, u = (int(rng.integers(0, 30)), int(rng.integers(0, 30)),
                   int(rng.integers(0, 16)))
        a = rng.integers(0, sigma, n)
        b = rng.integers(0, sigma, m)
        p = rng.integers(0, sigma, u)
        assert merlcs_tabulated(a, b, p, cube_b) == merlcs_naive(a, b, p)


def test_merlcs_matches_bruteforce():
    rng = rng_for(510)
    for _ in range(25):
        sigma = int(rng.choice([2, 3]))
        a = rng.integers(0, sigma, int(rng.integers(0, 12)))
        b = rng.integers(0, sigma, int(rng.integers(0, 12)))
        p = rng.integers(0, sigma, int(rng.integers(0, 9)))
        want = merlcs_bruteforce(a, b, p)
        assert merlcs_tabulated(a, b, p, 2) == want


def test_merlcs_stats_counters():
    rng = rng_for(511)
    a = rng.integers(0, 4, 20)
    b = rng.integers(0, 4, 18)
    p = rng.integers(0, 4, 12)
    value, stats = merlcs_tabulated_stats(a, b, p, 2)
    assert value == merlcs_naive(a, b, p)
    assert stats.blocks == 10 * 9 * 6
    assert stats.lut_allocations == 1
    assert 0 < stats.lut_entries <= stats.blocks
    assert stats.ragged_cells == 0
    assert stats.cells == 20 * 18 * 12


def test_merlcs_size_guard():
    a = np.zeros(600, np.int64)
    with pytest.raises(SizeGuardError):
        merlcs_tabulated(a, a, a)


def test_merged_grid_adjacency():
    rng = rng_for(512)
    a = rng.integers(0, 3, 14)
    b = rng.integers(0, 3, 11)
    p = rng.integers(0, 3, 9)
    grid = merlcs_matrix(a, b, p)
    for axis in range(3):
        diffs = np.diff(grid, axis=axis)
        assert diffs.min() >= -1 and diffs.max() <= 1  # contract
        assert diffs.min() >= 0  # observed tight range
