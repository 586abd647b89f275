"""Best-bound branch-and-cut over the DSL-BF relaxation."""
from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import SolverConfig
from .cuts.base import CutContext, separate_family
from .cuts.registry import FAMILIES
from .instance import CanonicalSolution, Instance
from .lp import INFEASIBLE, INT_TOL, SimplexLP
from .model import STATIC_FAMILIES, Model, build_model, decode_point
from .rows import EQ, LE, VALID, Cut
from .strategy import EffectivenessStats, plan_calls

log = logging.getLogger(__name__)

OPTIMAL, FEASIBLE, NO_SOLUTION, INFEASIBLE_STATUS = "Optimal", "Feasible", "NoSolution", "Infeasible"
PRUNE_TOL = 1e-6
AGE_SLACK = 0.1
AGE_LIMIT = 50


@dataclass
class Node:
    fixings: dict[int, int]
    bound: float
    depth: int
    seq: int = 0

    def key(self):
        return (self.bound, self.depth, self.seq)


class NodeQueue:
    """Open nodes ordered by parent bound, then depth, then insertion order."""

    def __init__(self):
        self._heap: list = []
        self._seq = 0

    def push(self, node: Node):
        node.seq = self._seq
        self._seq += 1
        heapq.heappush(self._heap, (node.key(), node))

    def pop(self) -> Node:
        return heapq.heappop(self._heap)[1]

    def min_bound(self) -> float:
        return self._heap[0][0][0] if self._heap else math.inf

    def __len__(self):
        return len(self._heap)


def select_node(tree: NodeQueue) -> Node:
    if not len(tree):
        raise IndexError("no open nodes")
    return tree.pop()


def is_integral(point, tol: float = INT_TOL) -> bool:
    p = np.asarray(point, float)
    return bool(np.all(np.abs(p - np.round(p)) <= tol))


def branch_var(point, tol: float = INT_TOL) -> int:
    """Index whose fractional part is closest to 0.5, smallest index on ties."""
    p = np.asarray(point, float)
    frac = p - np.floor(p)
    dist = np.abs(frac - 0.5)
    fractional = np.abs(p - np.round(p)) > tol
    if not fractional.any():
        raise ValueError("point is integral")
    dist = np.where(fractional, dist, np.inf)
    best = dist.min()
    return int(np.nonzero(dist <= best + 1e-12)[0][0])


def compute_gap(incumbent: float | None, bound: float) -> float:
    if incumbent is None:
        return 1.0
    g = (incumbent - bound) / max(abs(incumbent), 1e-9)
    return float(min(1.0, max(0.0, g)))


@dataclass
class PoolEntry:
    cut: Cut
    lp_row: int | None = None
    idle: int = 0
    added: int = 0


@dataclass
class SolveResult:
    status: str
    objective: float | None
    bound: float
    gap: float
    nodes: int
    cuts_by_family: dict[str, int]
    wall_minutes: float
    point: np.ndarray | None = None
    solution: CanonicalSolution | None = None
    added_cuts: list[Cut] = field(default_factory=list)
    bound_trace: list[tuple[float, float]] = field(default_factory=list)
    static_families: tuple[str, ...] = ()
    lp_iterations: int = 0
    rounds: int = 0

    @property
    def total_cuts(self) -> int:
        return sum(self.cuts_by_family.values())

    @property
    def timed_out(self) -> bool:
        return self.status in (FEASIBLE, NO_SOLUTION)


class BranchAndCut:
    def __init__(self, inst: Instance, config: SolverConfig | None = None):
        self.inst = inst
        self.cfg = config or SolverConfig()
        enabled = self.cfg.enabled_families()
        static = ()
        if self.cfg.static_rows and self.cfg.use_optimality_cuts:
            static = tuple(t for t in STATIC_FAMILIES if t in enabled)
        self.static = static
        self.model: Model = build_model(inst, static)
        sep = [t for t in enabled if t not in static]
        if not self.cfg.use_optimality_cuts:
            sep = [t for t in sep if FAMILIES[t].kind == VALID]
        self.families = sep
        self.ctx = CutContext(inst, seed=self.cfg.seed, cap=self.cfg.cut_cap,
                              max_structures=self.cfg.max_structures)
        self.stats = EffectivenessStats(FAMILIES)
        self.plan_rng = np.random.default_rng(self.cfg.seed + 1)
        self.pool: dict = {}
        self.lp_rows: list = []          # pool key per LP row beyond the model rows
        self.n_model_rows = len(self.model.rows)
        self.lp = SimplexLP(self.model.objective, np.zeros(inst.n_vars), np.ones(inst.n_vars),
                            self.model.rows)
        self.cuts_by_family = {t: 0 for t in sep}
        self.added_cuts: list[Cut] = []
        self.bound_trace: list[tuple[float, float]] = []
        self.incumbent: float | None = None
        self.best_point: np.ndarray | None = None
        self.nodes = 0
        self.rounds = 0
        self._t0 = 0.0

    # ---- helpers ----------------------------------------------------------------

    def _elapsed_min(self) -> float:
        return (time.perf_counter() - self._t0) / 60.0

    def _out_of_time(self) -> bool:
        lim = self.cfg.time_limit
        if lim is not None and self._elapsed_min() >= lim:
            return True
        return self.cfg.max_nodes is not None and self.nodes >= self.cfg.max_nodes

    def _solve_node_lp(self, fixings: dict[int, int]):
        lb = np.zeros(self.inst.n_vars)
        ub = np.ones(self.inst.n_vars)
        for j, v in fixings.items():
            lb[j] = ub[j] = v
        self.lp.set_bounds(lb, ub)
        return self.lp.solve()

    def _try_incumbent(self, x) -> bool:
        xr = np.round(x)
        if not self.model.is_feasible(xr, integral=True):
            return False
        obj = self.model.objective_value(xr)
        if self.incumbent is None or obj < self.incumbent - 1e-9:
            self.incumbent = obj
            self.best_point = xr
            self._log("incumbent")
        return True

    def _prunable(self, bound: float) -> bool:
        return self.incumbent is not None and bound >= self.incumbent - PRUNE_TOL

    def _log(self, event: str = "progress", bound: float | None = None):
        b = bound if bound is not None else float("nan")
        inc = "none" if self.incumbent is None else f"{self.incumbent:.6f}"
        log.info("node=%d bound=%.6f incumbent=%s gap=%.6f cuts=%d", self.nodes, b, inc,
                 compute_gap(self.incumbent, b) if bound is not None else 1.0,
                 len(self.added_cuts))

    # ---- cuts ---------------------------------------------------------------------

    def _separate(self, x) -> list[Cut]:
        if not self.families:
            return []
        plan = plan_calls(self.cfg.strategy_config(), self.stats, self.families, self.plan_rng)
        found: list[Cut] = []
        for fam in plan:
            new = []
            for c in separate_family(self.ctx, fam, x, self.cfg.eps_for(fam)):
                key = c.row.key()
                entry = self.pool.get(key)
                if entry is not None and entry.lp_row is not None:
                    continue
                if any(key == f.row.key() for f in new):
                    continue
                new.append(c)
            plan.report(fam, len(new))
            found.extend(new)
        # identical rows from different families count once
        uniq: dict = {}
        for c in found:
            uniq.setdefault(c.row.key(), c)
        return list(uniq.values())

    def _add_cuts(self, cuts: list[Cut]):
        rows = []
        for c in cuts:
            key = c.row.key()
            entry = self.pool.get(key)
            if entry is None:
                entry = self.pool[key] = PoolEntry(c)
                self.cuts_by_family[c.family] = self.cuts_by_family.get(c.family, 0) + 1
                self.added_cuts.append(c)
            entry.lp_row = self.n_model_rows + len(self.lp_rows)
            entry.idle = 0
            entry.added += 1
            self.lp_rows.append(key)
            rows.append(c.row)
        self.lp.add_rows(rows)

    def _age_cuts(self, res):
        if not self.lp_rows:
            return
        act = res.row_activity
        stale = []
        for k, key in enumerate(self.lp_rows):
            entry = self.pool[key]
            row = entry.cut.row
            a = act[self.n_model_rows + k]
            slack = (row.rhs - a) if row.sense == LE else (a - row.rhs) if row.sense != EQ else 0.0
            entry.idle = entry.idle + 1 if slack > AGE_SLACK else 0
            if entry.idle >= AGE_LIMIT:
                stale.append(self.n_model_rows + k)
        if stale:
            removed = set(self.lp.remove_rows(stale))
            if removed:
                keep = []
                for k, key in enumerate(self.lp_rows):
                    if self.n_model_rows + k in removed:
                        self.pool[key].lp_row = None
                    else:
                        keep.append(key)
                self.lp_rows = keep
                for k, key in enumerate(self.lp_rows):
                    self.pool[key].lp_row = self.n_model_rows + k

    def _cut_rounds(self, res, root: bool):
        limit = self.cfg.root_rounds if root else self.cfg.node_rounds
        for _ in range(limit):
            if res.status == INFEASIBLE or self._prunable(res.objective):
                break
            x = res.x
            if is_integral(x) and self.model.is_feasible(np.round(x), integral=True):
                break
            if self._out_of_time():
                break
            cuts = self._separate(x)
            if not cuts:
                break
            before = res.objective
            self._add_cuts(cuts)
            res = self.lp.solve()
            self.rounds += 1
            after = res.objective if res.status != INFEASIBLE else math.inf
            self.bound_trace.append((before, after))
            if after - before < self.cfg.tailoff * max(abs(before), 1e-9):
                break
        return res

    # ---- main loop ------------------------------------------------------------------

    def solve(self) -> SolveResult:
        self._t0 = time.perf_counter()
        tree = NodeQueue()
        tree.push(Node({}, -math.inf, 0))
        timed_out = False
        open_bound = math.inf
        while len(tree):
            if self._out_of_time():
                timed_out = True
                break
            node = select_node(tree)
            if self._prunable(node.bound):
                continue
            self.nodes += 1
            res = self._solve_node_lp(node.fixings)
            res = self._cut_rounds(res, root=self.nodes == 1)
            if res.status != INFEASIBLE:
                self._age_cuts(res)
            if self.nodes % max(1, self.cfg.log_every) == 0:
                self._log(bound=min(tree.min_bound(), res.objective))
            if res.status == INFEASIBLE or self._prunable(res.objective):
                continue
            x = res.x
            if is_integral(x) and self._try_incumbent(x):
                continue
            try:
                j = branch_var(x)
            except ValueError:
                # integral within tolerance but rejected by the exact re-check
                log.warning("integral LP point failed the feasibility re-check; node dropped")
                continue
            for val in (0, 1):
                fx = dict(node.fixings)
                fx[j] = val
                tree.push(Node(fx, res.objective, node.depth + 1))
        if timed_out:
            open_bound = tree.min_bound()
        return self._result(timed_out, open_bound)

    def _result(self, timed_out: bool, open_bound: float) -> SolveResult:
        if not timed_out:
            status = OPTIMAL if self.incumbent is not None else INFEASIBLE_STATUS
            bound = self.incumbent if self.incumbent is not None else math.inf
        else:
            status = FEASIBLE if self.incumbent is not None else NO_SOLUTION
            bound = min(open_bound, self.incumbent if self.incumbent is not None else math.inf)
        gap = 0.0 if status == OPTIMAL else compute_gap(self.incumbent, bound)
        sol = decode_point(self.inst, self.best_point) if self.best_point is not None else None
        self._log("done", bound=bound if np.isfinite(bound) else None)
        return SolveResult(status, self.incumbent, bound, gap, self.nodes, dict(self.cuts_by_family),
                           self._elapsed_min(), self.best_point, sol, list(self.added_cuts),
                           list(self.bound_trace), self.static, self.lp.total_iterations, self.rounds)


def solve_bnc(inst: Instance, config: SolverConfig | None = None, **overrides) -> SolveResult:
    cfg = config or SolverConfig()
    if overrides:
        cfg = cfg.updated(**overrides)
    return BranchAndCut(inst, cfg).solve()
