"""Command-line front end and benchmark harness.

Subcommands: lcs, edit, lcts, merlcs on input files; bench over seeded
generated instances; selftest for reduced oracle and table sweeps. Plain
output is one decimal integer per run; --json emits one flat object per
run so concatenated runs form line-delimited records.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .block_tabulation import (
    DEFAULT_KEY_BUDGET_BITS,
    WORD_BITS,
    BlockIo,
    TabulationParams,
    build_stripe_lut,
    lcs_tabulated_stats,
)
from .dp_reference import (
    edit_distance_naive,
    hunt_szymanski,
    lcs_naive,
    merlcs_naive,
)
from .errors import InputFormatError, ParameterError, SubseqError
from .instrumentation import EngineStats
from .seq_core import Sequence, count_matches, normalize_alphabet
from .similarity_variants import (
    CubeLut,
    edit_distance_hybrid_stats,
    edit_distance_tabulated_stats,
    lcts,
    merlcs_tabulated_stats,
)
from .sparse_hybrid import (
    HybridParams,
    SparseBlockKey,
    build_sparse_lut,
    lcs_hybrid_stats,
    recommend_engine,
    sparse_block_transition,
)

INPUT_FORMATS = ("bytes", "ints", "fasta-like")
ENGINE_IDS = ("auto", "naive", "hs", "tabulated", "hybrid")
PROBLEM_ENGINES = {
    "lcs": ("auto", "naive", "hs", "tabulated", "hybrid"),
    "edit": ("auto", "naive", "tabulated", "hybrid"),
    "lcts": ("auto", "naive", "tabulated"),
    "merlcs": ("auto", "naive", "tabulated"),
}
REPORT_FIELDS = ("problem", "engine", "result", "n", "m", "u", "sigma", "r",
                 "blocks", "lut_entries", "sparse_lookups", "dense_blocks",
                 "f_d", "wall_time_s")


class UsageError(Exception):
    """Flag combinations the command line cannot mean."""


@dataclass(frozen=True)
class RunReport:
    """One engine invocation: instance statistics, counters, timing."""

    problem: str
    engine: str
    result: int
    n: int
    m: int
    u: int | None
    sigma: int
    r: int
    blocks: int = 0
    lut_entries: int = 0
    sparse_lookups: int = 0
    dense_blocks: int = 0
    f_d: float | None = None
    wall_time_s: float = 0.0

    def __post_init__(self) -> None:
        if self.result < 0:
            raise ParameterError("result cannot be negative")
        for name in ("n", "m", "r", "blocks", "lut_entries",
                     "sparse_lookups", "dense_blocks"):
            if getattr(self, name) < 0:
                raise ParameterError(f"counter {name} cannot be negative")
        if self.f_d is not None and not 0.0 <= self.f_d <= 1.0:
            raise ParameterError("f_d must lie in [0, 1]")

    def to_json(self) -> str:
        return json.dumps({name: getattr(self, name)
                           for name in REPORT_FIELDS})


# ---------------------------------------------------------------------------
# input files


def parse_input(path: str, fmt: str = "bytes") -> Sequence:
    """Read one sequence: raw bytes, decimal integers, or fasta-like.

    bytes: one symbol per byte. ints: whitespace-separated non-negative
    decimals. fasta-like: lines starting with '>' are skipped, the rest are
    concatenated byte-wise. An empty file is an empty sequence.
    """
    if fmt not in INPUT_FORMATS:
        raise UsageError(f"format must be one of {INPUT_FORMATS}")
    with open(path, "rb") as handle:
        data = handle.read()
    if fmt == "bytes":
        return Sequence(np.frombuffer(data, np.uint8))
    if fmt == "fasta-like":
        body = b"".join(line for line in data.splitlines()
                        if not line.startswith(b">"))
        return Sequence(np.frombuffer(body, np.uint8))
    symbols = []
    for token in data.split():
        try:
            value = int(token)
        except ValueError:
            raise InputFormatError(
                f"malformed integer token {token[:20]!r} in {path}")
        if value < 0:
            raise InputFormatError(f"negative symbol {value} in {path}")
        symbols.append(value)
    return Sequence(symbols)


# ---------------------------------------------------------------------------
# configuration


def _env_engine() -> str | None:
    value = os.environ.get("SUBSEQ_ENGINE")
    if value is None:
        return None
    if value not in ENGINE_IDS:
        raise UsageError(f"SUBSEQ_ENGINE must be one of {ENGINE_IDS}")
    return value


def _env_budget() -> int | None:
    value = os.environ.get("SUBSEQ_KEY_BUDGET")
    if value is None:
        return None
    try:
        bits = int(value)
    except ValueError:
        raise UsageError("SUBSEQ_KEY_BUDGET must be an integer")
    if bits < 1:
        raise UsageError("SUBSEQ_KEY_BUDGET must be positive")
    return bits


def _resolve_engine(args) -> str:
    # flags beat the environment, the environment beats the default
    return args.engine or _env_engine() or "auto"


def _resolve_budget(args) -> int | None:
    # None lets each engine keep its own default
    if args.key_budget is not None:
        if args.key_budget < 1:
            raise UsageError("--key-budget must be positive")
        return args.key_budget
    return _env_budget()


def _block_params(args, budget: int | None) -> TabulationParams | None:
    given = [args.block_x1, args.block_x2, args.superblock_y]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise UsageError(
            "--block-x1, --block-x2 and --superblock-y go together")
    try:
        return TabulationParams(y=args.superblock_y, x1=args.block_x1,
                                x2=args.block_x2,
                                key_budget_bits=budget
                                or DEFAULT_KEY_BUDGET_BITS)
    except ParameterError as exc:
        raise UsageError(str(exc))


def _hybrid_params(args, budget: int | None) -> HybridParams | None:
    given = [args.block_b, args.threshold_k]
    if all(v is None for v in given):
        return None
    if any(v is None for v in given):
        raise UsageError("--block-b and --threshold-k go together")
    try:
        return HybridParams(b=args.block_b, K=args.threshold_k,
                            key_budget_bits=budget
                            or DEFAULT_KEY_BUDGET_BITS)
    except ParameterError as exc:
        raise UsageError(str(exc))


# ---------------------------------------------------------------------------
# single runs


def _auto_engine(problem: str, xa, xb) -> str:
    n, m = len(xa), len(xb)
    if n == 0 or m == 0:
        return "naive"
    _, _, sigma = normalize_alphabet(xa, xb)
    r = count_matches(xa, xb)
    picked = recommend_engine(n, m, r, sigma)
    if picked == "hunt_szymanski":
        picked = "hs"
    if picked not in PROBLEM_ENGINES[problem]:
        picked = "tabulated"
    return picked


def run_similarity(args) -> RunReport:
    """Parse inputs, dispatch one engine, and package the report."""
    problem = args.command
    engine = _resolve_engine(args)
    if engine not in PROBLEM_ENGINES[problem]:
        raise UsageError(f"engine {engine} does not apply to {problem}")
    budget = _resolve_budget(args)
    tab_params = _block_params(args, budget)
    hyb_params = _hybrid_params(args, budget)
    if tab_params is not None and engine != "tabulated":
        raise UsageError("block geometry flags require --engine tabulated")
    if hyb_params is not None and engine != "hybrid":
        raise UsageError("--block-b/--threshold-k require --engine hybrid")
    cube_b = getattr(args, "cube_b", None)
    if cube_b is not None and problem != "merlcs":
        raise UsageError("--cube-b only applies to merlcs")
    if cube_b is not None:
        try:
            CubeLut(b=cube_b, key_budget_bits=budget or WORD_BITS)
        except ParameterError as exc:
            raise UsageError(str(exc))

    fmt = args.format
    a = parse_input(args.a, fmt)
    b = parse_input(args.b, fmt)
    p = parse_input(args.p, fmt) if problem == "merlcs" else None

    if engine == "auto" and problem in ("lcs", "edit"):
        engine = _auto_engine(problem, a, b)
        if problem == "edit" and engine == "hs":
            engine = "tabulated"

    stats = EngineStats()
    start = time.perf_counter()
    if problem == "lcs":
        if engine == "naive":
            result = lcs_naive(a, b)
        elif engine == "hs":
            result = hunt_szymanski(a, b)
        elif engine == "tabulated":
            result, stats = lcs_tabulated_stats(a, b, tab_params,
                                                key_budget_bits=budget)
        else:
            result, stats = lcs_hybrid_stats(a, b, hyb_params,
                                             key_budget_bits=budget)
    elif problem == "edit":
        if engine == "naive":
            result = edit_distance_naive(a, b)
        elif engine == "tabulated":
            result, stats = edit_distance_tabulated_stats(
                a, b, tab_params, key_budget_bits=budget)
        else:
            result, stats = edit_distance_hybrid_stats(
                a, b, hyb_params, key_budget_bits=budget)
    elif problem == "lcts":
        mode = {"auto": "auto", "naive": "all_naive",
                "tabulated": "all_tabulated"}[engine]
        result = lcts(a, b, args.sigma, mode, key_budget_bits=budget)
    else:
        if engine == "naive":
            result = merlcs_naive(a, b, p)
        else:
            engine = "tabulated"
            result, stats = merlcs_tabulated_stats(
                a, b, p, cube_b if cube_b is not None else 2,
                key_budget_bits=budget)
    wall = time.perf_counter() - start

    _, _, sigma = normalize_alphabet(a, b)
    return RunReport(
        problem=problem, engine=engine, result=int(result),
        n=len(a), m=len(b), u=len(p) if p is not None else None,
        sigma=sigma, r=count_matches(a, b),
        blocks=stats.blocks, lut_entries=stats.lut_entries,
        sparse_lookups=stats.sparse_lookups, dense_blocks=stats.dense_blocks,
        f_d=stats.f_d, wall_time_s=wall)


# ---------------------------------------------------------------------------
# benchmark harness


def generate_instance(seed: int, index: int, n: int, m: int, sigma: int,
                      planted: int = 0):
    """Deterministic instance: uniform symbols, optionally a planted
    common subsequence whose length lower-bounds the LCS."""
    rng = np.random.default_rng([seed, index])
    a = rng.integers(0, sigma, n)
    b = rng.integers(0, sigma, m)
    bound = min(planted, n, m)
    if bound > 0:
        common = rng.integers(0, sigma, bound)
        a[np.sort(rng.choice(n, bound, replace=False))] = common
        b[np.sort(rng.choice(m, bound, replace=False))] = common
    return a, b, bound


def _bench_one(args, budget, tab_params, hyb_params, index, engine):
    a, b, bound = generate_instance(args.seed, index, args.n, args.m,
                                    args.sigma, args.planted)
    stats = EngineStats()
    start = time.perf_counter()
    if engine == "naive":
        result = lcs_naive(a, b)
    elif engine == "hs":
        result = hunt_szymanski(a, b)
    elif engine == "tabulated":
        result, stats = lcs_tabulated_stats(a, b, tab_params,
                                            key_budget_bits=budget)
    else:
        result, stats = lcs_hybrid_stats(a, b, hyb_params,
                                         key_budget_bits=budget)
    wall = 0.0 if args.no_times else time.perf_counter() - start
    if result < bound:
        raise SubseqError(
            f"instance {index}: {engine} returned {result}, "
            f"planted bound is {bound}")
    _, _, sigma = normalize_alphabet(a, b)
    return RunReport(
        problem="lcs", engine=engine, result=int(result),
        n=args.n, m=args.m, u=None, sigma=sigma, r=count_matches(a, b),
        blocks=stats.blocks, lut_entries=stats.lut_entries,
        sparse_lookups=stats.sparse_lookups, dense_blocks=stats.dense_blocks,
        f_d=stats.f_d, wall_time_s=wall)


def run_bench(args, out=None) -> list[RunReport]:
    """Seeded generated corpus, every requested engine, one row per run."""
    out = sys.stdout if out is None else out
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    for engine in engines:
        if engine not in ("naive", "hs", "tabulated", "hybrid"):
            raise UsageError(f"unknown bench engine {engine}")
    if args.n < 0 or args.m < 0 or args.count < 1 or args.sigma < 1:
        raise UsageError("bench needs n, m >= 0, count >= 1, sigma >= 1")
    budget = _resolve_budget(args)
    tab_params = _block_params(args, budget)
    hyb_params = _hybrid_params(args, budget)
    jobs = [(index, engine) for index in range(args.count)
            for engine in engines]
    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(
                lambda job: _bench_one(args, budget, tab_params, hyb_params,
                                       *job), jobs))
    else:
        rows = [_bench_one(args, budget, tab_params, hyb_params, index, eng)
                for index, eng in jobs]
    for index in range(args.count):
        first = rows[index * len(engines)].result
        for row in rows[index * len(engines):(index + 1) * len(engines)]:
            if row.result != first:
                raise SubseqError(
                    f"instance {index}: engines disagree "
                    f"({row.engine}={row.result}, {rows[index * len(engines)].engine}={first})")
    for row in rows:
        print(row.to_json(), file=out)
    return rows


# ---------------------------------------------------------------------------
# selftest


def _dp_codes_lcs(top, left, a_codes, b_codes):
    x1, x2 = len(top), len(left)
    T = [[0] * (x1 + 1) for _ in range(x2 + 1)]
    for t in range(1, x1 + 1):
        T[0][t] = T[0][t - 1] + top[t - 1]
    for s in range(1, x2 + 1):
        T[s][0] = T[s - 1][0] + left[s - 1]
        for t in range(1, x1 + 1):
            best = max(T[s - 1][t], T[s][t - 1])
            if a_codes[t - 1] == b_codes[s - 1]:
                best = max(best, T[s - 1][t - 1] + 1)
            T[s][t] = best
    bottom = [T[x2][t] - T[x2][t - 1] for t in range(1, x1 + 1)]
    right = [T[s][x1] - T[s - 1][x1] for s in range(1, x2 + 1)]
    return bottom, right, T[x2][x1]


def _dp_matchset_lcs(top, left, cells, b):
    T = [[0] * (b + 1) for _ in range(b + 1)]
    for t in range(1, b + 1):
        T[0][t] = T[0][t - 1] + top[t - 1]
    for s in range(1, b + 1):
        T[s][0] = T[s - 1][0] + left[s - 1]
        for t in range(1, b + 1):
            best = max(T[s - 1][t], T[s][t - 1])
            if (t - 1) * b + (s - 1) in cells:
                best = max(best, T[s - 1][t - 1] + 1)
            T[s][t] = best
    bottom = [T[b][t] - T[b][t - 1] for t in range(1, b + 1)]
    right = [T[s][b] - T[s - 1][b] for s in range(1, b + 1)]
    return bottom, right, T[b][b]


def _selftest_oracles(seed: int, out) -> bool:
    import itertools

    ok = True
    agree = 0
    runs = 100
    for i in range(runs):
        rng = np.random.default_rng([seed, 9000 + i])
        sigma = int(rng.choice([2, 4, 16, 256]))
        a = rng.integers(0, sigma, int(rng.integers(1, 81)))
        b = rng.integers(0, sigma, int(rng.integers(1, 81)))
        want = lcs_naive(a, b)
        got = {hunt_szymanski(a, b),
               lcs_tabulated_stats(a, b)[0],
               lcs_hybrid_stats(a, b)[0],
               lcs_hybrid_stats(a, b, dense_strategy="direct_dp")[0]}
        if got == {want}:
            agree += 1
    print(f"lcs oracle equivalence: {agree}/{runs}", file=out)
    ok &= agree == runs

    agree = 0
    runs = 50
    for i in range(runs):
        rng = np.random.default_rng([seed, 9500 + i])
        sigma = int(rng.choice([2, 4, 16]))
        a = rng.integers(0, sigma, int(rng.integers(0, 61)))
        b = rng.integers(0, sigma, int(rng.integers(0, 61)))
        want = edit_distance_naive(a, b)
        got = {edit_distance_tabulated_stats(a, b)[0],
               edit_distance_hybrid_stats(a, b)[0]}
        if got == {want}:
            agree += 1
    print(f"edit oracle equivalence: {agree}/{runs}", file=out)
    ok &= agree == runs

    # exhaustive sparse transition sweep, b=2, K=2
    params = HybridParams(b=2, K=2, key_budget_bits=64)
    checked = 0
    bad = 0
    for top in itertools.product((0, 1), repeat=2):
        for left in itertools.product((0, 1), repeat=2):
            for k in range(3):
                for cells in itertools.combinations(range(4), k):
                    key = SparseBlockKey(top_diffs=top, left_diffs=left,
                                         match_count=k, match_coords=cells)
                    got = sparse_block_transition(key, params)
                    want = _dp_matchset_lcs(top, left, set(cells), 2)
                    checked += 1
                    if (list(got[0]), list(got[1])) != (want[0], want[1]):
                        bad += 1
    print(f"sparse-key sweep b=2 K=2: {checked - bad}/{checked}", file=out)
    ok &= bad == 0

    # exhaustive stripe-table sweep, x1=x2=2
    tparams = TabulationParams(y=2, x1=2, x2=2, key_budget_bits=64)
    lut = build_stripe_lut([0, 1], tparams)
    checked = 0
    bad = 0
    for a_codes in itertools.product((0, 1, 2), repeat=2):
        for top in itertools.product((0, 1), repeat=2):
            for left in itertools.product((0, 1), repeat=2):
                io = BlockIo(top_diffs=list(top), left_diffs=list(left),
                             a_codes=list(a_codes))
                bottom, right, _ = lut.lookup(io)
                want = _dp_codes_lcs(top, left, a_codes, [0, 1])
                checked += 1
                if (list(bottom), list(right)) != (want[0], want[1]):
                    bad += 1
    print(f"stripe-table sweep x1=x2=2: {checked - bad}/{checked}", file=out)
    ok &= bad == 0

    agree = 0
    runs = 20
    for i in range(runs):
        rng = np.random.default_rng([seed, 9800 + i])
        a = rng.integers(0, 8, int(rng.integers(0, 31)))
        b = rng.integers(0, 8, int(rng.integers(0, 31)))
        if lcts(a, b, 8) == lcts(a, b, 8, "all_naive"):
            agree += 1
    print(f"lcts mode agreement: {agree}/{runs}", file=out)
    ok &= agree == runs

    agree = 0
    runs = 20
    for i in range(runs):
        rng = np.random.default_rng([seed, 9900 + i])
        a = rng.integers(0, 4, int(rng.integers(0, 26)))
        b = rng.integers(0, 4, int(rng.integers(0, 26)))
        p = rng.integers(0, 4, int(rng.integers(0, 13)))
        want = merlcs_naive(a, b, p)
        if (merlcs_tabulated_stats(a, b, p, 2)[0] == want
                and merlcs_tabulated_stats(a, b, p, 3)[0] == want):
            agree += 1
    print(f"merlcs cube agreement: {agree}/{runs}", file=out)
    ok &= agree == runs
    return ok


def run_selftest(args, out=None) -> int:
    """Reduced oracle-equivalence and exhaustive-table suites."""
    out = sys.stdout if out is None else out
    ok = _selftest_oracles(args.seed, out)
    print("selftest passed" if ok else "selftest FAILED", file=out)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subseq",
        description="Sequence similarity via tabulated and sparse DP.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--engine", choices=ENGINE_IDS, default=None)
    common.add_argument("--format", choices=INPUT_FORMATS, default="bytes")
    common.add_argument("--json", action="store_true")
    common.add_argument("--key-budget", type=int, default=None,
                        metavar="BITS")
    common.add_argument("--block-x1", type=int, default=None, metavar="N")
    common.add_argument("--block-x2", type=int, default=None, metavar="N")
    common.add_argument("--superblock-y", type=int, default=None,
                        metavar="N")
    common.add_argument("--block-b", type=int, default=None, metavar="N")
    common.add_argument("--threshold-k", type=int, default=None,
                        metavar="N")
    common.add_argument("--seed", type=int, default=0, metavar="N")

    for name in ("lcs", "edit"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("a")
        p.add_argument("b")

    p = sub.add_parser("lcts", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--sigma", type=int, required=True, metavar="S")

    p = sub.add_parser("merlcs", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("p")
    p.add_argument("--cube-b", type=int, default=None, metavar="N")

    p = sub.add_parser("bench", parents=[common])
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--sigma", type=int, default=8, metavar="S")
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--planted", type=int, default=0, metavar="L")
    p.add_argument("--engines", default="naive,hs,tabulated,hybrid")
    p.add_argument("--no-times", action="store_true")
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("selftest", parents=[common])
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "m", None) is None and args.command == "bench":
        args.m = args.n
    try:
        if args.command == "bench":
            run_bench(args)
            return 0
        if args.command == "selftest":
            return run_selftest(args)
        report = run_similarity(args)
        print(report.to_json() if args.json else report.result)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except SubseqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
