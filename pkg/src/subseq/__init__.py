"""Sequence similarity via tabulated and sparse dynamic programming.

Engines: classic DP baselines, Hunt-Szymanski, block-tabulated LCS/edit
distance, a sparse/dense hybrid, transposition-invariant LCS, and merged LCS.
"""

from .errors import InputFormatError, ParameterError, SizeGuardError, SubseqError
from .instrumentation import EngineStats
from .seq_core import (
    AlphabetStats,
    MatchIndex,
    Sequence,
    alphabet_stats,
    as_symbols,
    count_matches,
    enumerate_block_matches,
    normalize_alphabet,
)
from .block_tabulation import (
    DEFAULT_KEY_BUDGET_BITS,
    BlockIo,
    BlockLut,
    SuperblockCode,
    TabulationParams,
    build_stripe_lut,
    build_superblock_code,
    choose_params,
    lcs_tabulated,
    lcs_tabulated_stats,
    pack_stripe_key,
    remap_a_snippet,
    unpack_stripe_value,
)
from .dp_reference import (
    DpMatrix,
    edit_distance_naive,
    edit_matrix,
    hunt_szymanski,
    lcs_bruteforce,
    lcs_matrix,
    lcs_naive,
    merlcs_bruteforce,
    merlcs_matrix,
    merlcs_naive,
)

from .sparse_hybrid import (
    DENSE_STRATEGIES,
    BlockCensus,
    HybridParams,
    SparseBlockKey,
    SparseLut,
    build_sparse_lut,
    classify_blocks,
    default_hybrid_params,
    lcs_hybrid,
    lcs_hybrid_stats,
    recommend_engine,
    sparse_block_transition,
)
from .similarity_variants import (
    CubeLut,
    EditBlockIo,
    TranspositionPlan,
    default_transposition_tau,
    edit_distance_hybrid,
    edit_distance_hybrid_stats,
    edit_distance_tabulated,
    edit_distance_tabulated_stats,
    lcts,
    merlcs_tabulated,
    merlcs_tabulated_stats,
    plan_transpositions,
)

__version__ = "0.1.0"

__all__ = [
    "AlphabetStats",
    "BlockCensus",
    "BlockIo",
    "BlockLut",
    "CubeLut",
    "DEFAULT_KEY_BUDGET_BITS",
    "DENSE_STRATEGIES",
    "DpMatrix",
    "EditBlockIo",
    "EngineStats",
    "HybridParams",
    "InputFormatError",
    "MatchIndex",
    "ParameterError",
    "Sequence",
    "SizeGuardError",
    "SparseBlockKey",
    "SparseLut",
    "SubseqError",
    "SuperblockCode",
    "TabulationParams",
    "TranspositionPlan",
    "alphabet_stats",
    "as_symbols",
    "build_sparse_lut",
    "build_stripe_lut",
    "build_superblock_code",
    "choose_params",
    "classify_blocks",
    "count_matches",
    "default_hybrid_params",
    "default_transposition_tau",
    "edit_distance_hybrid",
    "edit_distance_hybrid_stats",
    "edit_distance_naive",
    "edit_distance_tabulated",
    "edit_distance_tabulated_stats",
    "edit_matrix",
    "enumerate_block_matches",
    "hunt_szymanski",
    "lcs_bruteforce",
    "lcs_hybrid",
    "lcs_hybrid_stats",
    "lcs_matrix",
    "lcs_naive",
    "lcs_tabulated",
    "lcs_tabulated_stats",
    "lcts",
    "merlcs_bruteforce",
    "merlcs_matrix",
    "merlcs_naive",
    "merlcs_tabulated",
    "merlcs_tabulated_stats",
    "normalize_alphabet",
    "pack_stripe_key",
    "plan_transpositions",
    "recommend_engine",
    "remap_a_snippet",
    "sparse_block_transition",
    "unpack_stripe_value",
]
