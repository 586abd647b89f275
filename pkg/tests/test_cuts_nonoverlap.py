import numpy as np
import pytest

from cut_helpers import point, violations
from rsabc.cuts.base import CutContext
from rsabc.cuts.nonoverlap import (minimal_overflow_sets, sep_central_between_3d,
                                   sep_central_between_lb, sep_k_demands_by_sum,
                                   sep_k_demands_not_exceed, sep_non_over_by_sum, sep_pos_fit_3d,
                                   sep_pos_fit_low_2d, sep_pos_fit_two_sets)
from rsabc.fixtures import fixture
from rsabc.instance import make_instance
from rsabc.model import var_index
from rsabc.oracle import audit_rows, oracle_table


def one_arc(vols, slots):
    return make_instance(2, [(0, 1)], [(0, 1, v) for v in vols], slots)


def test_non_over_by_sum_examples():
    inst = fixture("INST-B")
    x = point(inst, {(0, 0, 1): 1, (0, 0, 3): 1, (1, 0, 2): 1})
    assert violations(sep_non_over_by_sum(inst, x)) == [1.0]
    assert sep_non_over_by_sum(inst, np.full(inst.n_vars, 0.5)) == []


def test_minimal_overflow_sets():
    assert minimal_overflow_sets(fixture("INST-C")) == [(0, 1)]
    assert minimal_overflow_sets(fixture("INST-B")) == []
    # triples only when every pair fits
    inst = one_arc([2, 2, 2], 5)
    assert minimal_overflow_sets(inst) == [] and minimal_overflow_sets(inst, triples=True) == [(0, 1, 2)]


def test_k_demand_rows_on_overfull_link():
    inst = fixture("INST-C")
    both = point(inst, {(0, 0, 1): 1, (0, 0, 2): 1, (1, 0, 1): 1})
    assert len(sep_k_demands_not_exceed(inst, both)) == 2
    assert violations(sep_k_demands_by_sum(inst, both)) == [1.0]
    alone = point(inst, {(0, 0, 1): 1, (0, 0, 2): 1})
    assert sep_k_demands_not_exceed(inst, alone) == [] and sep_k_demands_by_sum(inst, alone) == []
    assert sep_k_demands_by_sum(inst, np.full(inst.n_vars, 0.5)) == []


def test_pos_fit_low_aggregated_example():
    inst = one_arc([3, 2], 5)
    bad = point(inst, {(1, 0, 1): 1, (0, 0, 2): 1})
    cuts = sep_pos_fit_low_2d(inst, bad, form="aggregated")
    assert cuts and max(c.violation for c in cuts) == pytest.approx(1.0)
    packed = point(inst, {(1, 0, 1): 1, (1, 0, 2): 1, (0, 0, 3): 1, (0, 0, 4): 1, (0, 0, 5): 1})
    for form in ("slots", "aggregated", "summed"):
        assert sep_pos_fit_low_2d(inst, packed, form=form) == []


def test_pos_fit_3d_rows_follow_the_window_conditions():
    inst = one_arc([2, 3, 2], 6)
    rows = CutContext(inst).block("posFit3DBySlots").rows()
    triples = {tuple(sorted(r.as_dict())) for r in rows if len(r.coeffs) == 3}
    ix = lambda d, s: var_index(inst, d, 0, s)    # noqa: E731
    assert tuple(sorted((ix(0, 2), ix(1, 3), ix(2, 4)))) in triples
    x = point(inst, {(0, 0, 2): 1, (1, 0, 3): 1, (2, 0, 4): 1})
    assert max(violations(sep_pos_fit_3d(inst, x))) == pytest.approx(1.0)
    # s3 - s1 = 3 > v(d2) = 2 is never generated
    narrow = one_arc([2, 2, 2], 6)
    for r in CutContext(narrow).block("posFit3DBySlots").rows():
        slots = sorted(k % 6 + 1 for k, _ in r.coeffs)
        assert slots[-1] - slots[0] <= 2


def test_pos_fit_3d_is_valid_on_a_single_link():
    inst = one_arc([2, 3, 2], 7)      # the three blocks fit exactly
    table = oracle_table(inst)
    assert table.solutions
    assert audit_rows(table, CutContext(inst).block("posFit3DBySlots").rows()).all()


def test_pos_fit_two_sets_example():
    inst = one_arc([3, 1], 4)
    rows = CutContext(inst).block("posFit2Sets").rows()
    want = {var_index(inst, 0, 0, 1): 1.0, var_index(inst, 1, 0, 2): 1.0}
    assert any(r.as_dict() == want and r.rhs == 1.0 for r in rows)
    x = point(inst, {(0, 0, 1): 1, (1, 0, 2): 1})
    assert max(violations(sep_pos_fit_two_sets(inst, x))) == 1.0
    assert audit_rows(oracle_table(inst), rows).all()


def test_central_slots_lb_examples():
    inst = one_arc([3, 1], 8)
    # gamma = {2, 3} for s2 = 5; with s1 = 1 outside gamma the full 2 is lost
    x = point(inst, {(0, 0, 1): 1, (1, 0, 5): 1})
    assert max(violations(sep_central_between_lb(inst, x))) == pytest.approx(2.0)
    # s1 = 2 lies inside gamma, so its own term pays back one unit
    y = point(inst, {(0, 0, 2): 1, (1, 0, 5): 1})
    assert max(violations(sep_central_between_lb(inst, y))) == pytest.approx(1.0)
    # at most one premise term active: rhs is never exceeded
    assert sep_central_between_lb(inst, point(inst, {(1, 0, 5): 1})) == []


def test_central_slots_3d_example():
    inst = one_arc([2, 1, 1], 8)
    x = point(inst, {(1, 0, 1): 1, (2, 0, 5): 1, (0, 0, 2): 1})
    assert max(violations(sep_central_between_3d(inst, x))) == pytest.approx(1.0)
    y = point(inst, {(1, 0, 1): 1, (0, 0, 2): 1})
    assert sep_central_between_3d(inst, y) == []


@pytest.mark.parametrize("vols, slots", [([2, 1, 1], 5), ([3, 2], 6), ([2, 2, 1], 6)])
def test_central_rows_hold_at_an_optimum(vols, slots):
    inst = one_arc(vols, slots)
    table = oracle_table(inst)
    ctx = CutContext(inst)
    rows = ctx.block("centralSlotsLB").rows() + ctx.block("centralSlots3D").rows()
    ok = audit_rows(table, rows)
    assert (ok.all(axis=1) & table.optimal_mask).any()
