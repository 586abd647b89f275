import numpy as np
import pytest

from cut_helpers import point, violations
from rsabc.cuts.base import CutContext
from rsabc.cuts.flow import (sep_antiparallel_implication, sep_antiparallel_pair, sep_eq_amount_arcs,
                             sep_exactly_vd, sep_induced_arcs, sep_max_disjoint_paths,
                             sep_not_branch, sep_one_slot_once)
from rsabc.cuts.pools import double_brooms, max_path_system, vertices_of
from rsabc.bench import micro_suite
from rsabc.fixtures import fixture, ring
from rsabc.instance import CanonicalSolution, make_instance
from rsabc.model import embed_canonical
from rsabc.oracle import enumerate_canonical

# triangle: arcs 0=(0,1), 1=(1,2), 2=(0,2); one demand 0->2 of volume 2 on 3 slots
TRI = fixture("INST-A")
TRI_OPT = embed_canonical(TRI, CanonicalSolution(((2,),), (1,)))
TRI_LONG = embed_canonical(TRI, CanonicalSolution(((0, 1),), (2,)))


def test_one_slot_once_examples():
    x = point(TRI, {(0, 0, 1): 0.7, (0, 2, 1): 0.7})
    assert violations(sep_one_slot_once(TRI, x, src_only=True)) == [0.4]
    assert sep_one_slot_once(TRI, x, eps=0.5, src_only=True) == []
    for p in (TRI_OPT, TRI_LONG):
        assert sep_one_slot_once(TRI, p) == []


def test_exactly_vd_examples():
    x = point(TRI, {(0, 0, 1): 1, (0, 0, 2): 1, (0, 2, 1): 1})
    assert violations(sep_exactly_vd(TRI, x, src_only=True)) == [1.0]
    y = point(TRI, {(0, 0, 1): 1, (0, 0, 2): 0.8, (0, 2, 1): 0.5})
    cuts = sep_exactly_vd(TRI, y, eps=0.2, src_only=True)
    assert violations(cuts) == [0.3] and cuts[0].row.tag == "exactlyVdFromSrc"
    for p in (TRI_OPT, TRI_LONG):
        assert sep_exactly_vd(TRI, p) == []


def test_not_branch_examples():
    x = point(TRI, {(0, 2, 1): 1, (0, 0, 1): 0.25, (0, 0, 2): 0.25})
    assert max(violations(sep_not_branch(TRI, x, src_only=True))) == pytest.approx(0.5)
    for p in (TRI_OPT, TRI_LONG):
        assert sep_not_branch(TRI, p) == []
    # no slot active on the tested arc: rhs v(d) is never exceeded by a source-bounded load
    y = point(TRI, {(0, 0, 1): 1, (0, 0, 2): 1})
    assert sep_not_branch(TRI, y, src_only=True) == []


def test_eq_amount_example():
    # slot 1 used once at the source, slot 2 used on two arcs
    x = point(TRI, {(0, 2, 1): 1, (0, 0, 2): 1, (0, 1, 2): 1})
    cuts = sep_eq_amount_arcs(TRI, x)
    assert max(violations(cuts)) == pytest.approx(1.0)
    # nothing leaves the source at any slot: every row has |E| of slack to spare
    y = point(TRI, {(0, 1, s): 1 for s in (1, 2, 3)})
    assert sep_eq_amount_arcs(TRI, y) == []
    for p in (TRI_OPT, TRI_LONG):
        assert sep_eq_amount_arcs(TRI, p) == [] and sep_eq_amount_arcs(TRI, p, summed=True) == []


def test_antiparallel_examples():
    inst = make_instance(2, [(0, 1), (1, 0)], [(0, 1, 1)], 2)
    x = point(inst, {(0, 0, 1): 0.6, (0, 1, 1): 0.6})
    assert max(violations(sep_antiparallel_pair(inst, x))) == pytest.approx(0.2)
    y = point(inst, {(0, 0, 1): 1, (0, 1, 2): 0.5})
    assert max(violations(sep_antiparallel_implication(inst, y))) == pytest.approx(0.5)
    assert sep_antiparallel_implication(inst, point(inst, {(0, 1, 2): 0.5})) == []


def test_cycle_rows():
    inst = ring(3, 2, [(0, 1, 1)], bidirectional=False)
    half = point(inst, {(0, e, 1): 0.5 for e in range(3)})
    assert sep_induced_arcs(inst, half) == []
    busy = point(inst, {(0, e, 1): 0.8 for e in range(3)})
    assert max(violations(sep_induced_arcs(inst, busy))) == pytest.approx(0.4)


def _nondegenerate(inst, kind, k, arcs):
    """Incoming broom of arc ij with some h -> i and j -> l on four distinct nodes."""
    i, j = inst.graph.arcs[k]
    g = inst.graph
    side = g.in_arcs(i) if kind == "in" else g.out_arcs(i)
    ends = [g.arcs[a][0] if kind == "in" else g.arcs[a][1] for a in side]
    outs = [g.arcs[a][1] for a in g.out_arcs(j)]
    return kind == "in" and any(a not in (i, j) and b not in (i, j, a) for a in ends for b in outs)


@pytest.mark.parametrize("inst", micro_suite()[:12], ids=lambda i: i.name)
def test_double_brooms_hold_at_most_three_path_arcs(inst):
    for kind, k, arcs in double_brooms(inst):
        n_arcs, n_vertices, n_paths = max_path_system(inst, arcs)
        assert n_arcs <= 3 and n_arcs == n_vertices - n_paths
        if _nondegenerate(inst, kind, k, arcs):
            # a path (h, i, j, l) through the defining arc fills the broom
            assert n_arcs == 3


def test_broom_rows_use_the_path_system_bound():
    inst = fixture("RING-4")
    ctx = CutContext(inst)
    blk = ctx.block("incomingDBrooms")
    for r in blk.rows():
        d = r.coeffs[0][0] // (inst.graph.m * inst.slots)
        assert r.rhs % inst.demands[d].volume == 0 and r.rhs / inst.demands[d].volume <= 3


def test_canonical_points_far_from_structures_give_no_broom_cuts():
    inst = fixture("RING-4")
    for sol in enumerate_canonical(inst)[:40]:
        assert sep_max_disjoint_paths(inst, embed_canonical(inst, sol), which="in") == []
