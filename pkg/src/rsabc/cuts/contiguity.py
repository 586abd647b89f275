"""Cuts that push each demand towards one contiguous block of slots per arc."""
from __future__ import annotations

from ..model import contiguity_rows
from ..rows import EQ, EQUATION, GE, LE, OPTIMALITY, VALID, LinearRow, RowBuilder, make_row
from ..symmetry import mirror_slots
from .base import CutContext, as_context, separate_family


def _residue_slots(slots: int, v: int, i: int, upto: int | None = None) -> list[int]:
    """Slots s <= upto (default all) with s = i (mod v)."""
    top = slots if upto is None else upto
    return [s for s in range(1, top + 1) if (s - i) % v == 0]


def _contiguity_ineq_rows(ctx: CutContext):
    inst = ctx.inst
    for d, dem in enumerate(inst.demands):
        v = dem.volume
        for e in range(inst.graph.m):
            for i in range(1, inst.slots + 1):
                coef = {ctx.idx(d, e, s): 1.0 for s in _residue_slots(inst.slots, v, i, i)}
                for s in _residue_slots(inst.slots, v, i - 1, i - 1):
                    k = ctx.idx(d, e, s)
                    coef[k] = coef.get(k, 0.0) - 1.0
                yield coef


def build_contiguity_ineqs(ctx: CutContext):
    b = RowBuilder("contiguityIneqs", ctx.n)
    for coef in _contiguity_ineq_rows(ctx):
        b.add(coef, GE, 0.0)
    return b.build()


def build_symm_contiguity_ineqs(ctx: CutContext):
    b = RowBuilder("symmContiguityIneqs", ctx.n)
    for coef in _contiguity_ineq_rows(ctx):
        b.add_row(mirror_slots(make_row(coef, GE, 0.0), ctx.inst.slots))
    return b.build()


def contiguity_eq_rows(inst, tag: str = "contiguityEqs") -> list[LinearRow]:
    """Per residue class i of v(d): slots = i and slots + 1 = i carry the same mass."""
    rows = []
    S = inst.slots
    for d, dem in enumerate(inst.demands):
        v = dem.volume
        for e in range(inst.graph.m):
            base = (d * inst.graph.m + e) * S
            for i in range(1, v + 1):
                coef: dict[int, float] = {}
                for s in _residue_slots(S, v, i):
                    coef[base + s - 1] = coef.get(base + s - 1, 0.0) + 1.0
                for s in _residue_slots(S, v, i - 1):
                    coef[base + s - 1] = coef.get(base + s - 1, 0.0) - 1.0
                rows.append(make_row(coef, EQ, 0.0, tag))
    return rows


def build_contiguity_eqs(ctx: CutContext):
    b = RowBuilder("contiguityEqs", ctx.n)
    for r in contiguity_eq_rows(ctx.inst):
        b.add_row(r)
    return b.build()


def _ppal_rows(ctx: CutContext, tag: str, which: str):
    inst, g = ctx.inst, ctx.inst.graph
    b = RowBuilder(tag, ctx.n)
    for d, dem in enumerate(inst.demands):
        v = dem.volume
        if which == "central":
            for s in range(inst.slots - v + 1, v + 1):
                b.add({ctx.idx(d, e, s): 1.0 for e in g.out_arcs(dem.source)}, EQ, 1.0, group=d)
            continue
        if which == "src":
            cuts = [frozenset(g.out_arcs(dem.source))]
        elif which == "dst":
            cuts = [frozenset(g.in_arcs(dem.target))]
        else:
            cuts = ctx.mincuts[d]
        residues = [1] if which == "first" else range(1, v + 1)
        for c in cuts:
            for i in residues:
                coef = {ctx.idx(d, e, s): 1.0 for e in c for s in _residue_slots(inst.slots, v, i)}
                b.add(coef, EQ, 1.0, group=d)
    return b.build()


def build_ppal_slots(ctx):
    return _ppal_rows(ctx, "ppalSlots", "all")


def build_ppal_slots_from_src(ctx):
    return _ppal_rows(ctx, "ppalSlotsFromSrc", "src")


def build_ppal_slots_to_dst(ctx):
    return _ppal_rows(ctx, "ppalSlotsToDst", "dst")


def build_ppal_slots_first_residue(ctx):
    return _ppal_rows(ctx, "ppalSlotsFirstResidue", "first")


def build_ppal_slots_central(ctx):
    return _ppal_rows(ctx, "ppalSlotsCentral", "central")


def far_slots(slots: int, v: int, s: int) -> list[int]:
    """Slots at distance at least v from s."""
    return list(range(1, s - v + 1)) + list(range(s + v, slots + 1))


def build_far_slots_off(ctx: CutContext):
    inst = ctx.inst
    b = RowBuilder("farSlotsOff", ctx.n)
    for d, dem in enumerate(inst.demands):
        v = dem.volume
        for e in range(inst.graph.m):
            for s in range(1, inst.slots + 1):
                far = far_slots(inst.slots, v, s)
                big = float(min(len(far), v))
                coef = {ctx.idx(d, e, s2): 1.0 for s2 in far}
                coef[ctx.idx(d, e, s)] = big
                b.add(coef, LE, big)
    return b.build()


def build_symmetrical_bf_contiguity(ctx: CutContext):
    b = RowBuilder("symmetricalBFcontiguity", ctx.n)
    for r in contiguity_rows(ctx.inst):
        b.add_row(mirror_slots(r, ctx.inst.slots))
    return b.build()


# ---- separators ---------------------------------------------------------------

def sep_contiguity_ineqs(ctx, point, eps=0.0, mirrored=False):
    return separate_family(as_context(ctx), "symmContiguityIneqs" if mirrored else "contiguityIneqs",
                           point, eps)


PPAL_TAGS = {"all": "ppalSlots", "src": "ppalSlotsFromSrc", "dst": "ppalSlotsToDst",
             "first": "ppalSlotsFirstResidue", "central": "ppalSlotsCentral"}


def sep_ppal_slots(ctx, point, eps=0.0, which="all"):
    return separate_family(as_context(ctx), PPAL_TAGS[which], point, eps)


def sep_far_slots_off(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "farSlotsOff", point, eps)


def sep_symmetrical_bf_contiguity(ctx, point, eps=0.0):
    return separate_family(as_context(ctx), "symmetricalBFcontiguity", point, eps)


FAMILY_SPECS = [
    ("contiguityIneqs", VALID, build_contiguity_ineqs, False),
    ("symmContiguityIneqs", VALID, build_symm_contiguity_ineqs, False),
    ("contiguityEqs", EQUATION, build_contiguity_eqs, False),
    ("ppalSlots", OPTIMALITY, build_ppal_slots, False),
    ("ppalSlotsFromSrc", OPTIMALITY, build_ppal_slots_from_src, False),
    ("ppalSlotsToDst", OPTIMALITY, build_ppal_slots_to_dst, False),
    ("ppalSlotsFirstResidue", OPTIMALITY, build_ppal_slots_first_residue, False),
    ("ppalSlotsCentral", OPTIMALITY, build_ppal_slots_central, False),
    ("farSlotsOff", OPTIMALITY, build_far_slots_off, False),
    ("symmetricalBFcontiguity", VALID, build_symmetrical_bf_contiguity, False),
]
