"""Flow-based optimality cuts: slot/volume limits per node, no branching, cycles, brooms."""
from __future__ import annotations

from ..rows import LE, OPTIMALITY, RowBuilder
from .base import CutContext, as_context, separate_family
from .pools import MAX_EXHAUSTIVE_ARCS, max_path_system, vertices_of


def _one_slot_once(ctx: CutContext, src_only: bool, tag: str):
    inst, g = ctx.inst, ctx.inst.graph
    b = RowBuilder(tag, ctx.n)
    for d, dem in enumerate(inst.demands):
        nodes = [dem.source] if src_only else [i for i in range(g.n) if i != dem.target]
        for i in nodes:
            for s in range(1, inst.slots + 1):
                b.add({ctx.idx(d, e, s): 1.0 for e in g.out_arcs(i)}, LE, 1.0)
    return b.build()


def build_one_slot_once_from_v(ctx):
    return _one_slot_once(ctx, False, "oneSlotOnceFromV")


def build_one_slot_once_from_src(ctx):
    return _one_slot_once(ctx, True, "oneSlotOnceFromSrc")


def _exactly_vd(ctx: CutContext, src_only: bool, tag: str):
    inst, g = ctx.inst, ctx.inst.graph
    b = RowBuilder(tag, ctx.n)
    for d, dem in enumerate(inst.demands):
        for i in ([dem.source] if src_only else range(g.n)):
            coef = {k: 1.0 for e in g.out_arcs(i) for k in ctx.slot_range(d, e)}
            b.add(coef, LE, float(dem.volume))
    return b.build()


def build_exactly_vd_from_v(ctx):
    return _exactly_vd(ctx, False, "exactlyVdFromV")


def build_exactly_vd_from_src(ctx):
    return _exactly_vd(ctx, True, "exactlyVdFromSrc")


def _not_branch(ctx: CutContext, src_only: bool, tag: str):
    """sum_{e' in out(i) - e} sum_s' u[d,e',s'] + v(d) u[d,e,s] <= v(d)."""
    inst, g = ctx.inst, ctx.inst.graph
    b = RowBuilder(tag, ctx.n)
    for d, dem in enumerate(inst.demands):
        v = float(dem.volume)
        for i in ([dem.source] if src_only else range(g.n)):
            out = g.out_arcs(i)
            for e in out:
                others = {k: 1.0 for f in out if f != e for k in ctx.slot_range(d, f)}
                for s in range(1, inst.slots + 1):
                    coef = dict(others)
                    coef[ctx.idx(d, e, s)] = v
                    b.add(coef, LE, v)
    return b.build()


def build_not_branch_from_v(ctx):
    return _not_branch(ctx, False, "notBranchFromV")


def build_not_branch_from_src(ctx):
    return _not_branch(ctx, True, "notBranchFromSrc")


def build_no_out_from_dst(ctx: CutContext):
    """No slot of demand d leaves its target."""
    inst, g = ctx.inst, ctx.inst.graph
    b = RowBuilder("noOutFromDst", ctx.n)
    for d, dem in enumerate(inst.demands):
        coef = {k: 1.0 for e in g.out_arcs(dem.target) for k in ctx.slot_range(d, e)}
        b.add(coef, LE, 0.0)
    return b.build()


def build_eq_amount(ctx: CutContext):
    """sum_e u[d,e,s'] <= sum_e u[d,e,s] + |E| (1 - sum_{e in out(s(d))} u[d,e,s]), s != s'."""
    inst, g = ctx.inst, ctx.inst.graph
    E = float(g.m)
    b = RowBuilder("eqAmountOfAsForEachUsedS", ctx.n)
    src_out = [set(g.out_arcs(dem.source)) for dem in inst.demands]
    for d in range(inst.n_demands):
        for s in range(1, inst.slots + 1):
            for s2 in range(1, inst.slots + 1):
                if s2 == s:
                    continue
                coef = {}
                for e in range(g.m):
                    coef[ctx.idx(d, e, s2)] = 1.0
                    coef[ctx.idx(d, e, s)] = -1.0 + (E if e in src_out[d] else 0.0)
                b.add(coef, LE, E)
    return b.build()


def build_eq_amount_summed(ctx: CutContext):
    """sum_{s'} sum_e u[d,e,s'] <= v(d) sum_e u[d,e,s] + v(d)|E| (1 - sum_{out(s(d))} u[d,e,s])."""
    inst, g = ctx.inst, ctx.inst.graph
    E = float(g.m)
    b = RowBuilder("eqAmountSummed", ctx.n)
    for d, dem in enumerate(inst.demands):
        v = float(dem.volume)
        src_out = set(g.out_arcs(dem.source))
        for s in range(1, inst.slots + 1):
            coef = {}
            for e in range(g.m):
                for s2 in range(1, inst.slots + 1):
                    coef[ctx.idx(d, e, s2)] = 1.0
            for e in range(g.m):
                k = ctx.idx(d, e, s)
                coef[k] = coef[k] - v + (v * E if e in src_out else 0.0)
            b.add(coef, LE, v * E)
    return b.build()


def _arcset_rows(ctx: CutContext, structures, tag: str, per_slot: bool, bound_of):
    """Rows over arc sets: per slot (<= bound) or summed over slots (<= v(d) * bound)."""
    inst = ctx.inst
    b = RowBuilder(tag, ctx.n)
    for gid, arcs in enumerate(structures):
        bound = bound_of(arcs)
        if bound is None:
            continue
        for d, dem in enumerate(inst.demands):
            if per_slot:
                for s in range(1, inst.slots + 1):
                    b.add({ctx.idx(d, e, s): 1.0 for e in arcs}, LE, float(bound), group=gid)
            else:
                coef = {k: 1.0 for e in arcs for k in ctx.slot_range(d, e)}
                b.add(coef, LE, float(dem.volume * bound), group=gid)
    return b.build()


def _path_system_bound(ctx: CutContext):
    cache: dict = {}

    def bound(arcs):
        if arcs not in cache:
            cache[arcs] = (max_path_system(ctx.inst, arcs)[0]
                           if len(arcs) <= MAX_EXHAUSTIVE_ARCS else None)
        return cache[arcs]
    return bound


def max_paths_structures(ctx: CutContext) -> list[frozenset]:
    g = ctx.inst.graph
    seen: dict[frozenset, None] = {}
    for i in range(g.n):
        for star in (g.out_arcs(i), g.in_arcs(i)):
            if len(star) >= 2:
                seen.setdefault(frozenset(star), None)
    for _, _, arcs in ctx.brooms:
        seen.setdefault(arcs, None)
    for arcs in ctx.cycle_sets:
        seen.setdefault(arcs, None)
    return list(seen)


def build_maximum_set_of_paths(ctx):
    return _arcset_rows(ctx, max_paths_structures(ctx), "maximumSetOfPaths", False,
                        _path_system_bound(ctx))


def _brooms(ctx: CutContext, kind: str, tag: str):
    structs = [arcs for k, _, arcs in ctx.brooms if k == kind]
    bounds = ctx.broom_bounds
    return _arcset_rows(ctx, structs, tag, False, lambda arcs: bounds.get(arcs))


def build_incoming_brooms(ctx):
    return _brooms(ctx, "in", "incomingDBrooms")


def build_outgoing_brooms(ctx):
    return _brooms(ctx, "out", "outcomingDBrooms")


def _induced_bound(ctx):
    return lambda arcs: len(vertices_of(ctx.inst, arcs)) - 1


def build_induced_per_slot(ctx):
    return _arcset_rows(ctx, ctx.cycle_sets, "inducedArcsPerSlot", True, _induced_bound(ctx))


def build_induced_summed(ctx):
    return _arcset_rows(ctx, ctx.cycle_sets, "inducedArcsSummed", False, _induced_bound(ctx))


def build_antiparallel_pair(ctx: CutContext):
    """u[d,ij,s] + u[d,ji,s] <= 1 per slot, and the slot-summed form <= v(d)."""
    inst = ctx.inst
    b = RowBuilder("antiparallelPair", ctx.n)
    for gid, (k1, k2) in enumerate(ctx.antiparallel):
        for d, dem in enumerate(inst.demands):
            for s in range(1, inst.slots + 1):
                b.add({ctx.idx(d, k1, s): 1.0, ctx.idx(d, k2, s): 1.0}, LE, 1.0, group=gid)
            coef = {k: 1.0 for e in (k1, k2) for k in ctx.slot_range(d, e)}
            b.add(coef, LE, float(dem.volume), group=gid)
    return b.build()


def build_antiparallel_implication(ctx: CutContext):
    """sum_s' u[d,ji,s'] + v(d) u[d,ij,s] <= v(d), both orientations of every pair."""
    inst = ctx.inst
    b = RowBuilder("antiparallelImplication", ctx.n)
    for gid, (k1, k2) in enumerate(ctx.antiparallel):
        for ij, ji in ((k1, k2), (k2, k1)):
            for d, dem in enumerate(inst.demands):
                v = float(dem.volume)
                for s in range(1, inst.slots + 1):
                    coef = {k: 1.0 for k in ctx.slot_range(d, ji)}
                    coef[ctx.idx(d, ij, s)] = v
                    b.add(coef, LE, v, group=gid)
    return b.build()


# ---- separators ---------------------------------------------------------------

def sep_one_slot_once(ctx, point, eps=0.0, src_only=False):
    return separate_family(as_context(ctx), "oneSlotOnceFromSrc" if src_only else "oneSlotOnceFromV",
                           point, eps)


def sep_exactly_vd(ctx, point, eps=0.0, src_only=False):
    return separate_family(as_context(ctx), "exactlyVdFromSrc" if src_only else "exactlyVdFromV",
                           point, eps)


def sep_not_branch(ctx, point, eps=0.0, src_only=False):
    return separate_family(as_context(ctx), "notBranchFromSrc" if src_only else "notBranchFromV",
                           point, eps)


def sep_eq_amount_arcs(ctx, point, eps=0.0, summed=False):
    return separate_family(as_context(ctx), "eqAmountSummed" if summed else "eqAmountOfAsForEachUsedS",
                           point, eps)


def sep_max_disjoint_paths(ctx, point, eps=0.0, which="all"):
    tag = {"all": "maximumSetOfPaths", "in": "incomingDBrooms", "out": "outcomingDBrooms"}[which]
    return separate_family(as_context(ctx), tag, point, eps)


def sep_induced_arcs(ctx, point, eps=0.0, per_slot=True):
    return separate_family(as_context(ctx), "inducedArcsPerSlot" if per_slot else "inducedArcsSummed",
                           point, eps)


def sep_antiparallel_pair(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "antiparallelPair", point, eps)


def sep_antiparallel_implication(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "antiparallelImplication", point, eps)


FAMILY_SPECS = [
    ("noOutFromDst", OPTIMALITY, build_no_out_from_dst, False),
    ("oneSlotOnceFromV", OPTIMALITY, build_one_slot_once_from_v, False),
    ("oneSlotOnceFromSrc", OPTIMALITY, build_one_slot_once_from_src, False),
    ("exactlyVdFromV", OPTIMALITY, build_exactly_vd_from_v, False),
    ("exactlyVdFromSrc", OPTIMALITY, build_exactly_vd_from_src, False),
    ("notBranchFromV", OPTIMALITY, build_not_branch_from_v, False),
    ("notBranchFromSrc", OPTIMALITY, build_not_branch_from_src, False),
    ("eqAmountOfAsForEachUsedS", OPTIMALITY, build_eq_amount, False),
    ("eqAmountSummed", OPTIMALITY, build_eq_amount_summed, False),
    ("maximumSetOfPaths", OPTIMALITY, build_maximum_set_of_paths, True),
    ("incomingDBrooms", OPTIMALITY, build_incoming_brooms, True),
    ("outcomingDBrooms", OPTIMALITY, build_outgoing_brooms, True),
    ("inducedArcsPerSlot", OPTIMALITY, build_induced_per_slot, True),
    ("inducedArcsSummed", OPTIMALITY, build_induced_summed, True),
    ("antiparallelPair", OPTIMALITY, build_antiparallel_pair, True),
    ("antiparallelImplication", OPTIMALITY, build_antiparallel_implication, True),
]
