"""Cuts coupling different demands that share an arc."""
from __future__ import annotations

from itertools import combinations

from ..rows import LE, OPTIMALITY, VALID, RowBuilder
from .base import CutContext, as_context, separate_family


def build_non_over_by_sum(ctx: CutContext):
    """u[d,e,s1] + sum_{d' != d} u[d',e,s2] + u[d,e,s2+1] <= 2 for s1 < s2."""
    inst = ctx.inst
    S, D = inst.slots, inst.n_demands
    b = RowBuilder("nonOverBySum", ctx.n)
    for e in range(inst.graph.m):
        for d in range(D):
            for s1 in range(1, S - 1):
                for s2 in range(s1 + 1, S):
                    coef = {ctx.idx(o, e, s2): 1.0 for o in range(D) if o != d}
                    coef[ctx.idx(d, e, s1)] = 1.0
                    coef[ctx.idx(d, e, s2 + 1)] = 1.0
                    b.add(coef, LE, 2.0)
    return b.build()


def minimal_overflow_sets(inst, triples: bool = False) -> list[tuple[int, ...]]:
    """Demand sets whose volumes exceed the slot count while every proper subset fits."""
    vols = [dem.volume for dem in inst.demands]
    out = []
    sizes = (2, 3) if triples else (2,)
    for k in sizes:
        for combo in combinations(range(len(vols)), k):
            total = sum(vols[d] for d in combo)
            if total > inst.slots and all(total - vols[d] <= inst.slots for d in combo):
                out.append(combo)
    return out


def build_k_demands_not_exceed(ctx: CutContext):
    """sum_s u[d,e,s] + v(d) sum_{d' in D'-d} sum_s u[d',e,s] <= v(d) sum_{D'-d} v(d')."""
    inst = ctx.inst
    b = RowBuilder("kDemandsNotExceed", ctx.n)
    for gid, group in enumerate(minimal_overflow_sets(inst, ctx.kdemand_triples)):
        for d in group:
            v = float(inst.demands[d].volume)
            others = [o for o in group if o != d]
            for e in range(inst.graph.m):
                coef = {k: 1.0 for k in ctx.slot_range(d, e)}
                for o in others:
                    for k in ctx.slot_range(o, e):
                        coef[k] = v
                rhs = v * sum(inst.demands[o].volume for o in others)
                b.add(coef, LE, rhs, group=gid)
    return b.build()


def build_k_demands_by_sum(ctx: CutContext):
    inst = ctx.inst
    b = RowBuilder("kDemandsBySum", ctx.n)
    for gid, group in enumerate(minimal_overflow_sets(inst, ctx.kdemand_triples)):
        vols = [inst.demands[d].volume for d in group]
        for e in range(inst.graph.m):
            coef = {k: 1.0 for d in group for k in ctx.slot_range(d, e)}
            b.add(coef, LE, float(sum(vols) - min(vols)), group=gid)
    return b.build()


def build_pos_fit_low_by_slots(ctx: CutContext):
    """u[d1,e,s''] + u[d2,e,s] <= 1 for s <= v(d1) and s'' <= max(s, v(d2))."""
    inst = ctx.inst
    D = inst.n_demands
    b = RowBuilder("posFitLow2DBySlots", ctx.n)
    for e in range(inst.graph.m):
        for d1 in range(D):
            v1 = inst.demands[d1].volume
            for d2 in range(D):
                if d2 == d1:
                    continue
                v2 = inst.demands[d2].volume
                for s in range(1, min(v1, inst.slots) + 1):
                    for s3 in range(1, min(max(s, v2), inst.slots) + 1):
                        b.add({ctx.idx(d1, e, s3): 1.0, ctx.idx(d2, e, s): 1.0}, LE, 1.0)
    return b.build()


def _low_block(ctx, b, d1, e, s, s1, activators):
    """sum_{s' <= s1} u[d1,e,s'] + s2 * sum(activators at slot s) <= s2, s2 = min(v(d1), s1)."""
    s1 = min(s1, ctx.inst.slots)
    s2 = float(min(ctx.inst.demands[d1].volume, s1))
    coef = {ctx.idx(d1, e, k): 1.0 for k in range(1, s1 + 1)}
    for o in activators:
        coef[ctx.idx(o, e, s)] = s2
    b.add(coef, LE, s2)


def build_pos_fit_low_aggregated(ctx: CutContext):
    inst = ctx.inst
    D = inst.n_demands
    b = RowBuilder("posFitLow2DAggregated", ctx.n)
    for e in range(inst.graph.m):
        for d1 in range(D):
            for d2 in range(D):
                if d2 != d1:
                    v2 = inst.demands[d2].volume
                    for s in range(1, min(inst.demands[d1].volume, inst.slots) + 1):
                        _low_block(ctx, b, d1, e, s, max(s, v2), [d2])
    return b.build()


def build_pos_fit_low_summed(ctx: CutContext):
    inst = ctx.inst
    D = inst.n_demands
    b = RowBuilder("posFitLow2DSummed", ctx.n)
    if D < 2:
        return b.build()
    for e in range(inst.graph.m):
        for d1 in range(D):
            others = [o for o in range(D) if o != d1]
            vmin = min(inst.demands[o].volume for o in others)
            for s in range(1, min(inst.demands[d1].volume, inst.slots) + 1):
                _low_block(ctx, b, d1, e, s, max(s, vmin), others)
    return b.build()


def build_pos_fit_3d(ctx: CutContext):
    """Three slots s1 < s2 < s3 within v(d2) of each other cannot all be taken around d2."""
    inst = ctx.inst
    S, D = inst.slots, inst.n_demands
    vol = [dem.volume for dem in inst.demands]
    b = RowBuilder("posFit3DBySlots", ctx.n)
    for e in range(inst.graph.m):
        for d2 in range(D):
            others = [o for o in range(D) if o != d2]
            if not others:
                continue
            vmin = min(vol[o] for o in others)
            for s1 in range(1, S + 1):
                for s3 in range(s1 + 2, min(S, s1 + vol[d2]) + 1):
                    for s2 in range(s1 + 1, s3):
                        mid = ctx.idx(d2, e, s2)
                        for d1 in others:
                            if vol[d1] > s1:
                                continue
                            for d3 in others:
                                if d3 != d1 and s3 <= S - vol[d3] + 1:
                                    b.add({ctx.idx(d1, e, s1): 1.0, mid: 1.0,
                                           ctx.idx(d3, e, s3): 1.0}, LE, 2.0)
                        # variation: both outer terms summed over D - {d2}
                        if vmin <= s1 and s3 <= S - vmin + 1 and len(others) > 1:
                            coef = {mid: 1.0}
                            for o in others:
                                coef[ctx.idx(o, e, s1)] = 1.0
                                coef[ctx.idx(o, e, s3)] = 1.0
                            b.add(coef, LE, 2.0)
    return b.build()


def build_pos_fit_two_sets(ctx: CutContext):
    inst = ctx.inst
    vol = [dem.volume for dem in inst.demands]
    b = RowBuilder("posFit2Sets", ctx.n)
    for e in range(inst.graph.m):
        for s2 in range(2, min(max(vol), inst.slots) + 1):
            big = [d for d in range(len(vol)) if vol[d] >= s2]
            small = [d for d in range(len(vol)) if vol[d] < s2]
            for s1 in range(1, s2):
                coef = {ctx.idx(d, e, s1): 1.0 for d in big}
                coef.update({ctx.idx(d, e, s2): 1.0 for d in small})
                b.add(coef, LE, 1.0)
    return b.build()


def build_central_slots_lb(ctx: CutContext):
    """|g| (sum_{d' != d} u[d',e,s2] + u[d,e,s1]) - sum_{s' in g} u[d,e,s'] <= |g|, g = [s2-v, v]."""
    inst = ctx.inst
    S, D = inst.slots, inst.n_demands
    b = RowBuilder("centralSlotsLB", ctx.n)
    for e in range(inst.graph.m):
        for d in range(D):
            v = inst.demands[d].volume
            if v <= 1:
                continue
            for s2 in range(v + 1, min(2 * v, S) + 1):
                gamma = range(s2 - v, v + 1)
                size = float(len(gamma))
                for s1 in range(1, s2):
                    coef = {ctx.idx(o, e, s2): size for o in range(D) if o != d}
                    coef[ctx.idx(d, e, s1)] = size
                    for g in gamma:
                        k = ctx.idx(d, e, g)
                        coef[k] = coef.get(k, 0.0) - 1.0
                    b.add(coef, LE, size)
    return b.build()


def build_central_slots_3d(ctx: CutContext):
    inst = ctx.inst
    S, D = inst.slots, inst.n_demands
    b = RowBuilder("centralSlots3D", ctx.n)
    for e in range(inst.graph.m):
        for d in range(D):
            v = inst.demands[d].volume
            others = [o for o in range(D) if o != d]
            for s1 in range(1, S - 2 * v + 1):
                for s3 in range(s1 + v + 1, s1 + 2 * v + 1):
                    gamma = range(s3 - v, s1 + v + 1)
                    size = float(len(gamma))
                    for s2 in range(s1 + 1, s3):
                        coef: dict[int, float] = {}
                        for o in others:
                            coef[ctx.idx(o, e, s1)] = size
                            coef[ctx.idx(o, e, s3)] = size
                        coef[ctx.idx(d, e, s2)] = size
                        for g in gamma:
                            k = ctx.idx(d, e, g)
                            coef[k] = coef.get(k, 0.0) - 1.0
                        b.add(coef, LE, 2.0 * size)
    return b.build()


# ---- separators ---------------------------------------------------------------

def sep_non_over_by_sum(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "nonOverBySum", point, eps)


def sep_k_demands_not_exceed(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "kDemandsNotExceed", point, eps)


def sep_k_demands_by_sum(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "kDemandsBySum", point, eps)


POS_FIT_LOW_TAGS = {"slots": "posFitLow2DBySlots", "aggregated": "posFitLow2DAggregated",
                    "summed": "posFitLow2DSummed"}


def sep_pos_fit_low_2d(ctx, point, eps=0.0, form="aggregated"):
    return separate_family(as_context(ctx), POS_FIT_LOW_TAGS[form], point, eps)


def sep_pos_fit_3d(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "posFit3DBySlots", point, eps)


def sep_pos_fit_two_sets(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "posFit2Sets", point, eps)


def sep_central_between_lb(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "centralSlotsLB", point, eps)


def sep_central_between_3d(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "centralSlots3D", point, eps)


FAMILY_SPECS = [
    ("nonOverBySum", VALID, build_non_over_by_sum, False),
    ("kDemandsNotExceed", OPTIMALITY, build_k_demands_not_exceed, False),
    ("kDemandsBySum", OPTIMALITY, build_k_demands_by_sum, False),
    ("posFitLow2DBySlots", OPTIMALITY, build_pos_fit_low_by_slots, False),
    ("posFitLow2DAggregated", OPTIMALITY, build_pos_fit_low_aggregated, False),
    ("posFitLow2DSummed", OPTIMALITY, build_pos_fit_low_summed, False),
    ("posFit3DBySlots", VALID, build_pos_fit_3d, False),
    ("posFit2Sets", VALID, build_pos_fit_two_sets, False),
    ("centralSlotsLB", OPTIMALITY, build_central_slots_lb, False),
    ("centralSlots3D", OPTIMALITY, build_central_slots_3d, False),
]
