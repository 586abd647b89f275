"""Brute-force ground truth for micro instances: enumeration, exact optima, cut audits, witnesses."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .cuts.pools import simple_paths
from .instance import CanonicalSolution, Instance
from .lp import OPTIMAL, LpProblem, solve_lp
from .model import var_index
from .rows import EQ, GE, LE, Cut, LinearRow, VALID, EQUATION, rows_to_csr

MAX_PATHS = 200
MAX_SOLUTIONS = 100_000
AUDIT_TOL = 1e-9
WITNESS_TOL = 1e-6


class OracleLimitError(RuntimeError):
    """The instance is too large for exhaustive enumeration."""


class OracleInfeasible(RuntimeError):
    """The instance has no feasible canonical solution."""


def enumerate_canonical(inst: Instance, max_paths: int = MAX_PATHS,
                        max_solutions: int = MAX_SOLUTIONS) -> list[CanonicalSolution]:
    """Every feasible (simple path, start slot) assignment, in deterministic order.

    Demands are assigned in index order; paths in DFS order by arc index; start slots ascending.
    """
    S = inst.slots
    options = []
    for d, dem in enumerate(inst.demands):
        try:
            paths = simple_paths(inst, dem.source, dem.target, limit=max_paths)
        except OverflowError:
            raise OracleLimitError(f"demand {d} has more than {max_paths} simple paths") from None
        options.append([(p, l) for p in paths for l in range(1, S - dem.volume + 2)])

    used = np.zeros((inst.graph.m, S + 2), bool)
    out: list[CanonicalSolution] = []
    chosen: list[tuple[tuple[int, ...], int]] = []

    def rec(d: int):
        if d == inst.n_demands:
            if len(out) >= max_solutions:
                raise OracleLimitError(f"more than {max_solutions} canonical solutions")
            out.append(CanonicalSolution(tuple(p for p, _ in chosen), tuple(l for _, l in chosen)))
            return
        v = inst.demands[d].volume
        for p, l in options[d]:
            arcs = list(p)
            if used[arcs, l:l + v].any():
                continue
            used[arcs, l:l + v] = True
            chosen.append((p, l))
            rec(d + 1)
            chosen.pop()
            used[arcs, l:l + v] = False

    rec(0)
    return out


@dataclass
class OracleTable:
    """All canonical solutions of an instance with their embeddings as a sparse matrix."""
    inst: Instance
    solutions: list[CanonicalSolution]

    @cached_property
    def objectives(self) -> np.ndarray:
        return np.array([s.objective() for s in self.solutions], dtype=np.int64)

    @cached_property
    def optimum(self) -> int | None:
        return int(self.objectives.min()) if self.solutions else None

    @cached_property
    def optimal_mask(self) -> np.ndarray:
        if not self.solutions:
            return np.zeros(0, bool)
        return self.objectives == self.optimum

    @cached_property
    def embeddings(self) -> sp.csr_matrix:
        rows, cols = [], []
        for k, sol in enumerate(self.solutions):
            for d, (path, l) in enumerate(zip(sol.paths, sol.starts)):
                v = self.inst.demands[d].volume
                for e in path:
                    base = var_index(self.inst, d, e, l)
                    cols.extend(range(base, base + v))
                    rows.extend([k] * v)
        data = np.ones(len(rows))
        return sp.csr_matrix((data, (rows, cols)), shape=(len(self.solutions), self.inst.n_vars))

    def point(self, k: int) -> np.ndarray:
        return self.embeddings[k].toarray().ravel()


def oracle_table(inst: Instance, **limits) -> OracleTable:
    return OracleTable(inst, enumerate_canonical(inst, **limits))


@dataclass
class OracleOptimum:
    objective: int
    argmin: list[CanonicalSolution]


def oracle_optimum(inst_or_table) -> OracleOptimum:
    table = inst_or_table if isinstance(inst_or_table, OracleTable) else oracle_table(inst_or_table)
    if not table.solutions:
        raise OracleInfeasible("no feasible canonical solution")
    opt = [s for s, m in zip(table.solutions, table.optimal_mask) if m]
    return OracleOptimum(table.optimum, opt)


@dataclass
class AuditReport:
    valid_on_all: bool
    holds_at_some_optimum: bool
    counterexamples: list[CanonicalSolution] = field(default_factory=list)
    n_solutions: int = 0

    def passes(self, kind: str) -> bool:
        if kind in (VALID, EQUATION):
            return self.valid_on_all
        return self.holds_at_some_optimum


def audit_rows(table: OracleTable, rows: Sequence[LinearRow], tol: float = AUDIT_TOL) -> np.ndarray:
    """Boolean matrix (solutions x rows): row k holds at solution i."""
    if not rows:
        return np.ones((len(table.solutions), 0), bool)
    R = rows_to_csr(list(rows), table.inst.n_vars)
    lhs = (table.embeddings @ R.T).toarray() if table.solutions else np.zeros((0, len(rows)))
    rhs = np.array([r.rhs for r in rows])
    sense = np.array([{LE: 1, EQ: 0, GE: -1}[r.sense] for r in rows])
    diff = lhs - rhs
    return np.where(sense == 1, diff <= tol, np.where(sense == -1, diff >= -tol, np.abs(diff) <= tol))


def audit_cut(inst_or_table, cut, max_counterexamples: int = 5) -> AuditReport:
    """Evaluate a cut (or row) on every canonical solution of the instance."""
    table = inst_or_table if isinstance(inst_or_table, OracleTable) else oracle_table(inst_or_table)
    row = cut.row if isinstance(cut, Cut) else cut
    ok = audit_rows(table, [row])[:, 0]
    bad = np.nonzero(~ok)[0][:max_counterexamples]
    return AuditReport(bool(ok.all()), bool((ok & table.optimal_mask).any()),
                       [table.solutions[i] for i in bad], len(table.solutions))


def audit_cuts(table: OracleTable, cuts: Sequence[Cut]) -> list[tuple[Cut, bool]]:
    """(cut, passes) for each cut, judged by its kind."""
    ok = audit_rows(table, [c.row for c in cuts])
    out = []
    for k, c in enumerate(cuts):
        col = ok[:, k]
        passed = bool(col.all()) if c.kind in (VALID, EQUATION) else bool((col & table.optimal_mask).any())
        out.append((c, passed))
    return out


@dataclass
class WitnessQuery:
    n_vars: int
    base: list[LinearRow]
    target: LinearRow


@dataclass
class WitnessResult:
    point: np.ndarray | None
    violation: float
    vacuous: bool = False

    @property
    def found(self) -> bool:
        return self.point is not None


def find_witness(query: WitnessQuery) -> WitnessResult:
    """LP point satisfying the base rows that violates the target as much as possible."""
    t = query.target
    coef = np.zeros(query.n_vars)
    for i, c in t.coeffs:
        coef[i] = c
    directions = {LE: [-1.0], GE: [1.0], EQ: [-1.0, 1.0]}[t.sense]
    best = WitnessResult(None, 0.0)
    for sign in directions:
        res = solve_lp(LpProblem(sign * coef, list(query.base), 0.0, 1.0))
        if res.status != OPTIMAL:
            return WitnessResult(None, 0.0, vacuous=True)
        lhs = float(coef @ res.x)
        viol = lhs - t.rhs if sign < 0 else t.rhs - lhs
        if viol > WITNESS_TOL and viol > best.violation:
            best = WitnessResult(res.x.copy(), viol)
    return best


@dataclass
class FamilyWitness:
    target: LinearRow
    result: WitnessResult
    tried: int


def family_witness(inst: Instance, target: str, base_families: Sequence[str] = (),
                   include_model: bool = True, max_targets: int = 200,
                   seed: int = 0) -> FamilyWitness | None:
    """First row of family ``target`` that the model plus ``base_families`` fail to imply.

    Target rows are tried in block order; ``None`` means no fractional witness among
    the first ``max_targets`` rows.
    """
    from .cuts.base import CutContext
    from .model import build_model

    ctx = CutContext(inst, seed=seed)
    base = list(build_model(inst, ()).rows) if include_model else []
    for fam in base_families:
        base.extend(ctx.block(fam).rows())
    for k, row in enumerate(ctx.block(target).rows()[:max_targets]):
        res = find_witness(WitnessQuery(inst.n_vars, base, row))
        if res.vacuous:
            return None
        if res.found:
            return FamilyWitness(row, res, k + 1)
    return None
