"""Separation context shared by all families, and the generic block separator."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..instance import Instance
from ..model import var_index
from ..rows import Cut, RowBlock
from . import pools

VIOLATION_TOL = 1e-6


@dataclass
class FamilySpec:
    tag: str
    kind: str
    build: object            # callable(ctx) -> RowBlock
    sampled: bool = False    # rows grouped by pool structure; a random subset is checked per call
    module: str = ""


class CutContext:
    """Per-instance state for separators: pools, cached row blocks and a seeded RNG."""

    def __init__(self, inst: Instance, seed: int = 0, cap: int = 500, max_structures: int = 200,
                 max_cycle_len: int = 6, max_mincuts: int = 20, kdemand_triples: bool = False,
                 max_family_rows: int = 200_000):
        self.inst = inst
        self.n = inst.n_vars
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.cap = cap
        self.max_structures = max_structures
        self.max_cycle_len = max_cycle_len
        self.max_mincuts = max_mincuts
        self.kdemand_triples = kdemand_triples
        self.max_family_rows = max_family_rows
        self._blocks: dict[str, RowBlock] = {}

    def idx(self, d: int, e: int, s: int) -> int:
        return var_index(self.inst, d, e, s)

    def slot_range(self, d: int, e: int) -> range:
        base = self.idx(d, e, 1)
        return range(base, base + self.inst.slots)

    @cached_property
    def brooms(self):
        return pools.double_brooms(self.inst)

    @cached_property
    def broom_bounds(self) -> dict[frozenset, int]:
        """Max arcs a vertex-disjoint path system can use in each broom."""
        out = {}
        for _, _, arcs in self.brooms:
            if len(arcs) <= pools.MAX_EXHAUSTIVE_ARCS and arcs not in out:
                out[arcs] = pools.max_path_system(self.inst, arcs)[0]
        return out

    @cached_property
    def cycle_sets(self) -> list[frozenset]:
        return pools.cycle_structures(self.inst, self.max_cycle_len)

    @cached_property
    def antiparallel(self) -> list[tuple[int, int]]:
        return pools.antiparallel_pairs(self.inst)

    @cached_property
    def mincuts(self) -> list[list[frozenset]]:
        rng = np.random.default_rng(self.seed + 7919)
        return [pools.minimal_cuts(self.inst, d, rng, cap=self.max_mincuts)
                for d in range(self.inst.n_demands)]

    def block(self, tag: str) -> RowBlock:
        if tag not in self._blocks:
            from .registry import FAMILIES
            blk = FAMILIES[tag].build(self)
            if len(blk) > self.max_family_rows:
                keep = np.sort(np.random.default_rng(self.seed).choice(
                    len(blk), self.max_family_rows, replace=False))
                blk = RowBlock(blk.tag, blk.n, blk.matrix[keep], blk.rhs[keep], blk.senses[keep],
                               blk.groups[keep])
            self._blocks[tag] = blk
        return self._blocks[tag]


def as_context(ctx_or_inst) -> CutContext:
    if isinstance(ctx_or_inst, CutContext):
        return ctx_or_inst
    return CutContext(ctx_or_inst)


def separate_block(block: RowBlock, point, eps: float, kind: str, cap: int = 500,
                   rng: np.random.Generator | None = None, max_groups: int | None = None) -> list[Cut]:
    """Rows of ``block`` violated by at least max(eps, VIOLATION_TOL), most violated first."""
    if len(block) == 0:
        return []
    viol = block.violations(point)
    mask = (viol >= eps) & (viol > VIOLATION_TOL)
    if max_groups is not None and rng is not None and len(block.groups):
        n_groups = int(block.groups.max()) + 1
        if n_groups > max_groups:
            chosen = np.zeros(n_groups, bool)
            chosen[rng.choice(n_groups, max_groups, replace=False)] = True
            mask &= (block.groups < 0) | chosen[np.maximum(block.groups, 0)]
    hits = np.nonzero(mask)[0]
    if len(hits) > cap:
        order = np.argsort(-viol[hits], kind="stable")
        hits = np.sort(hits[order[:cap]])
    return [Cut(block.row(int(k)), kind, float(viol[k])) for k in hits]


def separate_family(ctx: CutContext, tag: str, point, eps: float = 0.0) -> list[Cut]:
    from .registry import FAMILIES
    spec = FAMILIES[tag]
    blk = ctx.block(tag)
    return separate_block(blk, point, eps, spec.kind, cap=ctx.cap,
                          rng=ctx.rng if spec.sampled else None,
                          max_groups=ctx.max_structures if spec.sampled else None)
