"""DSL-BF integer program: variables u[d,e,s], objective, model rows, embeddings."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .instance import CanonicalSolution, Instance, check_canonical_feasible
from .rows import EQ, GE, LE, LinearRow, format_row, make_row, rows_to_csr

STATIC_FAMILIES = ("noOutFromDst", "contiguityEqs")


def var_index(inst: Instance, d: int, e: int, s: int) -> int:
    """Linear index of u[d,e,s]; slots are 1-based."""
    return (d * inst.graph.m + e) * inst.slots + (s - 1)


def unravel(inst: Instance, idx: int) -> tuple[int, int, int]:
    rest, s0 = divmod(int(idx), inst.slots)
    d, e = divmod(rest, inst.graph.m)
    return d, e, s0 + 1


@dataclass
class Model:
    inst: Instance
    objective: np.ndarray
    rows: list[LinearRow]
    static: frozenset = field(default_factory=frozenset)

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def idx(self, d: int, e: int, s: int) -> int:
        return var_index(self.inst, d, e, s)

    def unravel(self, idx: int) -> tuple[int, int, int]:
        return unravel(self.inst, idx)

    @cached_property
    def matrix(self):
        return rows_to_csr(self.rows, self.n_vars)

    @cached_property
    def _rhs_sense(self):
        rhs = np.array([r.rhs for r in self.rows], float)
        sense = np.array([{LE: 1, EQ: 0, GE: -1}[r.sense] for r in self.rows], np.int8)
        return rhs, sense

    def row_violations(self, point) -> np.ndarray:
        lhs = self.matrix @ np.asarray(point, float)
        rhs, sense = self._rhs_sense
        diff = lhs - rhs
        return np.where(sense == 1, np.maximum(diff, 0), np.where(sense == -1, np.maximum(-diff, 0),
                                                                  np.abs(diff)))

    def is_feasible(self, point, tol: float = 1e-6, integral: bool = True) -> bool:
        point = np.asarray(point, float)
        if point.shape != (self.n_vars,):
            return False
        if np.any(point < -tol) or np.any(point > 1 + tol):
            return False
        if integral and np.any(np.abs(point - np.round(point)) > tol):
            return False
        return not self.rows or float(self.row_violations(point).max()) <= tol

    def objective_value(self, point) -> float:
        """Sum per demand first, then divide by the volume, so integral points give exact values."""
        if self.inst.n_demands == 0:
            return 0.0
        per_demand = np.asarray(point, float).reshape(self.inst.n_demands, -1).sum(axis=1)
        vols = np.array([d.volume for d in self.inst.demands], float)
        return float(math.fsum(per_demand / vols))

    def count(self, tag: str) -> int:
        return sum(1 for r in self.rows if r.tag == tag)

    def dump(self) -> str:
        return "\n".join(format_row(r, self.unravel) for r in self.rows)


def build_model(inst: Instance, static_rows=()) -> Model:
    """Objective and rows of DSL-BF, plus the requested static optimality rows.

    ``static_rows`` may contain ``"noOutFromDst"`` and ``"contiguityEqs"``.
    Rows with no coefficients are kept so that row counts follow the closed forms.
    """
    static = frozenset(static_rows)
    unknown = static - set(STATIC_FAMILIES)
    if unknown:
        raise ValueError(f"unknown static row families: {sorted(unknown)}")
    g = inst.graph
    S = inst.slots
    ix = lambda d, e, s: var_index(inst, d, e, s)  # noqa: E731

    objective = np.zeros(inst.n_vars)
    for d, dem in enumerate(inst.demands):
        objective[ix(d, 0, 1):ix(d, 0, 1) + g.m * S] = 1.0 / dem.volume

    rows: list[LinearRow] = []
    for d, dem in enumerate(inst.demands):
        for j in range(g.n):
            if j in (dem.source, dem.target):
                continue
            for s in range(1, S + 1):
                coef = {ix(d, e, s): 1.0 for e in g.in_arcs(j)}
                for e in g.out_arcs(j):
                    coef[ix(d, e, s)] = -1.0
                rows.append(make_row(coef, EQ, 0.0, "flow"))
    for d, dem in enumerate(inst.demands):
        coef = {ix(d, e, s): 1.0 for e in g.out_arcs(dem.source) for s in range(1, S + 1)}
        rows.append(make_row(coef, GE, dem.volume, "sourceVolume"))
    for d, dem in enumerate(inst.demands):
        coef = {ix(d, e, s): 1.0 for e in g.in_arcs(dem.source) for s in range(1, S + 1)}
        rows.append(make_row(coef, EQ, 0.0, "sourceIn"))
    for e in range(g.m):
        for s in range(1, S + 1):
            coef = {ix(d, e, s): 1.0 for d in range(inst.n_demands)}
            rows.append(make_row(coef, LE, 1.0, "clash"))
    rows += contiguity_rows(inst)

    if "noOutFromDst" in static:
        for d, dem in enumerate(inst.demands):
            coef = {ix(d, e, s): 1.0 for e in g.out_arcs(dem.target) for s in range(1, S + 1)}
            rows.append(make_row(coef, EQ, 0.0, "noOutFromDst"))
    if "contiguityEqs" in static:
        from .cuts.contiguity import contiguity_eq_rows
        rows += contiguity_eq_rows(inst)
    return Model(inst, objective, rows, static)


def contiguity_rows(inst: Instance, tag: str = "contiguity") -> list[LinearRow]:
    """v(d)(u[d,e,s] - u[d,e,s+1]) <= sum_{s'=f}^{s} u[d,e,s'], with u[d,e,S+1] = 0."""
    S = inst.slots
    rows = []
    for d, dem in enumerate(inst.demands):
        v = dem.volume
        for e in range(inst.graph.m):
            for s in range(1, S + 1):
                coef: dict[int, float] = {}
                coef[var_index(inst, d, e, s)] = float(v)
                if s < S:
                    coef[var_index(inst, d, e, s + 1)] = -float(v)
                for sp_ in range(max(1, s - v + 1), s + 1):
                    k = var_index(inst, d, e, sp_)
                    coef[k] = coef.get(k, 0.0) - 1.0
                rows.append(make_row(coef, LE, 0.0, tag))
    return rows


def embed_canonical(inst: Instance, sol: CanonicalSolution) -> np.ndarray:
    ok, report = check_canonical_feasible(inst, sol)
    if not ok:
        raise ValueError("infeasible canonical solution: " + "; ".join(report))
    point = np.zeros(inst.n_vars)
    for d, dem in enumerate(inst.demands):
        l = sol.starts[d]
        for e in sol.paths[d]:
            base = var_index(inst, d, e, l)
            point[base:base + dem.volume] = 1.0
    return point


def decode_point(inst: Instance, point, tol: float = 1e-6) -> CanonicalSolution | None:
    """Extract a canonical solution from an integral model point.

    For each demand, finds the lowest start slot l and a path from source to
    target whose arcs all carry slots [l, l+v-1]. Returns None if some demand
    has no such path.
    """
    u = np.asarray(point, float).reshape(inst.n_demands, inst.graph.m, inst.slots) > 0.5
    g = inst.graph
    paths, starts = [], []
    for d, dem in enumerate(inst.demands):
        v = dem.volume
        found = None
        for l in range(1, inst.slots - v + 2):
            usable = u[d, :, l - 1:l - 1 + v].all(axis=1)
            prev = {dem.source: None}
            queue = [dem.source]
            while queue and dem.target not in prev:
                nxt = []
                for node in queue:
                    for e in g.out_arcs(node):
                        h = g.arcs[e][1]
                        if usable[e] and h not in prev:
                            prev[h] = e
                            nxt.append(h)
                queue = nxt
            if dem.target in prev:
                path = []
                node = dem.target
                while node != dem.source:
                    e = prev[node]
                    path.append(e)
                    node = g.arcs[e][0]
                found = (tuple(reversed(path)), l)
                break
        if found is None:
            return None
        paths.append(found[0])
        starts.append(found[1])
    return CanonicalSolution(tuple(paths), tuple(starts))
