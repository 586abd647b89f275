"""End-to-end acceptance checks; each test prints one PASS/FAIL line in the terminal summary."""
import json
from pathlib import Path

import numpy as np
import pytest

from lp_oracle import random_lp, vertex_enumeration
from rsabc.bench import (FEASIBLE_TIMEOUT, NO_SOLUTION_TIMEOUT, PLAIN_BB, SOLVED, TauInput,
                         compare_strategies, compute_tau)
from rsabc.bnc import INFEASIBLE_STATUS, OPTIMAL, solve_bnc
from rsabc.cuts import FAMILY_TAGS, CutContext
from rsabc.instance import parse_instance
from rsabc.lp import LpProblem, solve_lp
from rsabc.model import build_model
from rsabc.oracle import audit_cuts
from rsabc.rows import EQ, GE, LE, make_row
from rsabc.strategy import CLI_NAMES

from symmetry_helpers import mirror_audit

STRATEGY_NAMES = tuple(CLI_NAMES)
WITNESS_FILE = Path(__file__).parent / "fixtures" / "witnesses.json"


@pytest.fixture(scope="module")
def criterion_solves(criterion_suite):
    """Every strategy with every family enabled, on every suite instance."""
    return {(strat, e.name): solve_bnc(e.inst, strategy=strat, seed=e.seed)
            for strat in STRATEGY_NAMES for e in criterion_suite}


def test_criterion_1_oracle_equivalence(criterion_suite, oracle_tables, criterion_solves):
    assert len(criterion_suite) >= 23
    for e in criterion_suite:
        g = e.inst.graph
        assert g.n <= 6 and g.m <= 10 and e.inst.n_demands <= 3 and e.inst.slots <= 6
    mismatches = []
    for (strat, name), res in criterion_solves.items():
        opt = oracle_tables[name].optimum
        if opt is None:
            ok = res.status == INFEASIBLE_STATUS
        else:
            ok = res.status == OPTIMAL and res.objective == opt
        if not ok:
            mismatches.append((strat, name, res.status, res.objective, opt))
    assert mismatches == []


def test_criterion_2_cut_soundness_audit(oracle_tables, criterion_solves):
    checked, failures = 0, []
    for (strat, name), res in criterion_solves.items():
        table = oracle_tables[name]
        if not table.solutions or not res.added_cuts:
            continue
        for cut, passed in audit_cuts(table, res.added_cuts):
            checked += 1
            if not passed:
                failures.append((strat, name, cut.family))
    assert checked > 0 and failures == []


def test_criterion_3_symmetry_transforms(oracle_tables):
    tables = list(oracle_tables.values())
    for k, transform in enumerate(("slots", "node_flow", "endpoints")):
        checked, failures, changed = mirror_audit(tables, transform, 150, seed=8 + k)
        assert checked >= 100 and failures == 0 and changed == 0, transform


def _lp_satisfies(x, A, senses, b, tol=1e-7):
    ax = A @ x
    return all((s == "<=" and ax[i] <= b[i] + tol) or (s == ">=" and ax[i] >= b[i] - tol)
               or (s == "=" and abs(ax[i] - b[i]) <= tol) for i, s in enumerate(senses))


def test_criterion_4_lp_discipline(criterion_solves):
    rounds = 0
    for res in criterion_solves.values():
        for before, after in res.bound_trace:
            assert after >= before - 1e-9
            rounds += 1
    assert rounds > 0
    rng = np.random.default_rng(4)
    sense_of = {"<=": LE, ">=": GE, "=": EQ}
    for k in range(50):
        c, A, senses, b, lb, ub = random_lp(rng, feasible=k % 5 != 0)
        rows = [make_row({j: a for j, a in enumerate(A[i]) if a}, sense_of[s], b[i], "r")
                for i, s in enumerate(senses)]
        res = solve_lp(LpProblem(c, rows, lb, ub))
        status, best = vertex_enumeration(c, A, senses, b, lb, ub)
        assert res.status == status
        if status == OPTIMAL:
            assert abs(res.objective - best) <= 1e-6
            assert _lp_satisfies(res.x, A, senses, b)


def test_criterion_5_non_implication_witnesses():
    records = json.loads(WITNESS_FILE.read_text())
    labels = {r["target_family"] for r in records}
    assert {"kDemandsNotExceed", "farSlotsOff"} <= labels
    assert labels & {"notBranchFromSrc", "notBranchFromV"}
    for rec in records:
        inst = parse_instance(rec["instance"])
        x = np.zeros(inst.n_vars)
        for i, v in rec["point"].items():
            x[int(i)] = v
        # the point satisfies the model and every base family within LP tolerance
        base = list(build_model(inst, ()).rows)
        ctx = CutContext(inst)
        for fam in rec["base_families"]:
            base.extend(ctx.block(fam).rows())
        assert max(row.violation(x) for row in base) <= 1e-7, rec["label"]
        assert np.all(x >= -1e-9) and np.all(x <= 1 + 1e-9)
        t = rec["target"]
        target = make_row({int(i): c for i, c in t["coeffs"]}, t["sense"], t["rhs"], rec["target_family"])
        assert target.key() in {r.key() for r in ctx.block(rec["target_family"]).rows()}
        assert target.violation(x) > 1e-6
        assert target.violation(x) == pytest.approx(rec["violation"], abs=1e-9)


def _box_violation_bound(block) -> float:
    """No point of the unit box violates any row of the block by more than this."""
    worst = 0.0
    for row in block.rows():
        pos = sum(c for _, c in row.coeffs if c > 0)
        neg = sum(c for _, c in row.coeffs if c < 0)
        worst = max(worst, pos - row.rhs, row.rhs - neg)
    return worst


def test_criterion_6_epsilon_degeneracy(criterion_suite):
    mismatches, productive = [], set()
    for e in criterion_suite:
        plain = solve_bnc(e.inst, families=(), static_rows=False, seed=e.seed)
        ctx = CutContext(e.inst)
        for fam in FAMILY_TAGS:
            eps = _box_violation_bound(ctx.block(fam)) + 1.0
            res = solve_bnc(e.inst, families=(fam,), eps={fam: eps}, static_rows=False, seed=e.seed)
            if res.total_cuts != 0 or res.nodes != plain.nodes:
                mismatches.append((e.name, fam, res.total_cuts, res.nodes, plain.nodes))
        if e.name == "DIAMOND-2D" or len(productive) < 3:
            for fam in ("nonOverBySum", "farSlotsOff", "contiguityIneqs"):
                if solve_bnc(e.inst, families=(fam,), static_rows=False, seed=e.seed).total_cuts:
                    productive.add(fam)
    assert mismatches == []
    # the degenerate runs are not trivially cut-free: at zero threshold some family does cut
    assert productive


def test_criterion_7_strategies_beat_plain_branch_and_bound(criterion_suite):
    rows = compare_strategies(criterion_suite, STRATEGY_NAMES, time_limit=0.5, runs=2)
    plain = next(r for r in rows if r.strategy == PLAIN_BB)
    best = min((r for r in rows if r.strategy != PLAIN_BB), key=lambda r: r.sum_tau)
    print(f"\nplain B&B sum_tau={plain.sum_tau * 60:.3f}s; best {best.strategy} h={best.h} "
          f"sum_tau={best.sum_tau * 60:.3f}s")
    assert best.sum_tau <= plain.sum_tau


def test_criterion_8_tau_formula():
    assert compute_tau(TauInput(2.0, 0.0, SOLVED)) == 2.0
    assert compute_tau(TauInput(8.0, 0.5, FEASIBLE_TIMEOUT)) == 8.0 + 2.0 + 0.5 * 2.0
    assert compute_tau(TauInput(10.0, 1.0, NO_SOLUTION_TIMEOUT)) == 20.0
