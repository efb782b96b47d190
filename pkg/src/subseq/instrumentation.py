"""Operation counters reported by the block-based engines.

Wall-clock numbers at desk scale say little about asymptotic behaviour, so
the engines count the quantities the cost analysis is actually about: blocks
processed through a LUT, LUT entries materialized, sparse/dense block splits,
and the size of auxiliary buffers.
"""

from dataclasses import dataclass, field


@dataclass
class EngineStats:
    """Counters filled in by one engine invocation.

    blocks: full blocks processed via lookup tables.
    ragged_cells: cells of trailing partial blocks handled by direct DP.
    lut_entries: LUT entries actually computed (lazy fills included).
    lut_capacity: addressable entries of the largest LUT buffer.
    lut_allocations: number of LUT buffers allocated (the stripe engines
        must allocate exactly one and recycle it per stripe).
    sparse_lookups / dense_blocks: hybrid-engine block classification counts.
    f_d: fraction of census blocks exceeding the sparse threshold
        (None for engines without a census).
    cells: cells visited by per-cell engines (naive DP); lets benchmarks
        report per-cell vs per-block operation ratios.
    aux_lut_bytes / aux_border_bytes: auxiliary allocation accounting.
    """

    blocks: int = 0
    ragged_cells: int = 0
    lut_entries: int = 0
    lut_capacity: int = 0
    lut_allocations: int = 0
    sparse_lookups: int = 0
    dense_blocks: int = 0
    f_d: float | None = None
    cells: int = 0
    aux_lut_bytes: int = 0
    aux_border_bytes: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def aux_bytes(self) -> int:
        return self.aux_lut_bytes + self.aux_border_bytes
