"""Bounded-variable primal simplex for box-bounded minimisation LPs.

Every row ``a x (sense) b`` gets a row variable ``r = a x`` whose bounds encode
the sense, so the working system is ``A x - r = 0`` and the all-row-variable
basis is always available. Phase one minimises the sum of basic bound
violations (composite simplex), which lets any basis be used as a warm start:
after appending rows, after changing bounds, or after removing rows.

The basis inverse is kept dense and updated in product form, with a fresh
inversion every ``REFACTOR_EVERY`` pivots.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .rows import EQ, GE, LE, LinearRow

log = logging.getLogger(__name__)

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
INT_TOL = 1e-6
PIVOT_TOL = 1e-9
HARRIS_TOL = 1e-9
DEGENERATE_LIMIT = 200
REFACTOR_EVERY = 100
MAX_ITER = 50_000

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"


class LpStalled(RuntimeError):
    """Iteration limit hit; the solver refuses to report a possibly wrong answer."""


class LpInternalError(RuntimeError):
    pass


@dataclass
class LpProblem:
    objective: np.ndarray
    rows: list[LinearRow]
    lb: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, float)
        n = len(self.objective)
        self.lb = np.broadcast_to(np.asarray(self.lb, float), (n,)).copy()
        self.ub = np.broadcast_to(np.asarray(self.ub, float), (n,)).copy()
        if np.any(self.lb > self.ub) or np.any(self.lb < 0) or np.any(self.ub > 1):
            raise ValueError("bounds must satisfy 0 <= lb <= ub <= 1")


@dataclass(frozen=True)
class Basis:
    head: tuple[int, ...]
    at_upper: tuple[bool, ...]


@dataclass
class LpResult:
    status: str
    objective: float
    x: np.ndarray
    basis: Basis | None
    iterations: int
    infeasibility: float = 0.0
    row_activity: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _row_bounds(row: LinearRow) -> tuple[float, float]:
    if row.sense == LE:
        return -np.inf, row.rhs
    if row.sense == GE:
        return row.rhs, np.inf
    if row.sense == EQ:
        return row.rhs, row.rhs
    raise ValueError(row.sense)


class SimplexLP:
    """A persistent LP context supporting warm re-solves."""

    def __init__(self, objective, lb, ub, rows: Sequence[LinearRow] = (), max_iter: int = MAX_ITER):
        self.n = len(objective)
        self.c = np.asarray(objective, float).copy()
        self.max_iter = max_iter
        self.A = np.zeros((0, self.n))
        self.lo = np.asarray(lb, float).copy()
        self.hi = np.asarray(ub, float).copy()
        self.at_upper = np.zeros(self.n, bool)
        self.x = self.lo.copy()
        self.head = np.zeros(0, np.int64)
        self.pos = np.full(self.n, -1, np.int64)
        self.Binv = np.zeros((0, 0))
        self.total_iterations = 0
        self._since_refactor = 0
        if rows:
            self.add_rows(rows)

    @classmethod
    def from_problem(cls, prob: LpProblem, max_iter: int = MAX_ITER) -> "SimplexLP":
        return cls(prob.objective, prob.lb, prob.ub, prob.rows, max_iter=max_iter)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    # ---- structure changes -------------------------------------------------

    def add_rows(self, rows: Sequence[LinearRow]):
        if not rows:
            return
        k = len(rows)
        new = np.zeros((k, self.n))
        rlo = np.empty(k)
        rhi = np.empty(k)
        for i, r in enumerate(rows):
            for j, c in r.coeffs:
                new[i, j] = c
            rlo[i], rhi[i] = _row_bounds(r)
        m0 = self.m
        # basis inverse of [[B, 0], [A_new,B, -I]] is [[Binv, 0], [A_new,B Binv, -I]]
        a_newB = np.zeros((k, m0))
        struct = self.head < self.n
        a_newB[:, struct] = new[:, self.head[struct]]
        binv = np.zeros((m0 + k, m0 + k))
        binv[:m0, :m0] = self.Binv
        binv[m0:, :m0] = a_newB @ self.Binv
        binv[m0:, m0:] = -np.eye(k)
        self.Binv = binv
        self.A = np.vstack([self.A, new])
        xs = self.x[:self.n]
        new_vals = new @ xs
        # row variables live at indices n .. n+m-1
        self.lo = np.concatenate([self.lo, rlo])
        self.hi = np.concatenate([self.hi, rhi])
        self.x = np.concatenate([self.x, new_vals])
        self.at_upper = np.concatenate([self.at_upper, np.zeros(k, bool)])
        new_vars = np.arange(self.n + m0, self.n + m0 + k)
        self.head = np.concatenate([self.head, new_vars])
        self.pos = np.concatenate([self.pos, np.arange(m0, m0 + k)])

    def remove_rows(self, row_ids: Sequence[int]):
        """Drop rows whose row variable is basic; others are skipped. Returns removed ids."""
        ids = sorted({int(i) for i in row_ids if self.pos[self.n + int(i)] >= 0})
        if not ids:
            return []
        keep_rows = np.setdiff1d(np.arange(self.m), ids)
        drop_vars = set(self.n + i for i in ids)
        keep_vars = np.array([v for v in range(self.n + self.m) if v not in drop_vars], np.int64)
        remap = np.full(self.n + self.m, -1, np.int64)
        remap[keep_vars] = np.arange(len(keep_vars))
        head = [remap[v] for v in self.head if v not in drop_vars]
        self.A = self.A[keep_rows]
        self.lo = self.lo[keep_vars]
        self.hi = self.hi[keep_vars]
        self.x = self.x[keep_vars]
        self.at_upper = self.at_upper[keep_vars]
        self.head = np.array(head, np.int64)
        self._rebuild_pos()
        self._refactor()
        return ids

    def set_bounds(self, lb, ub):
        self.lo[:self.n] = lb
        self.hi[:self.n] = ub
        nonbasic = self.pos[:self.n] < 0
        self.at_upper[:self.n] &= self.hi[:self.n] > self.lo[:self.n]
        xs = np.where(self.at_upper[:self.n], self.hi[:self.n], self.lo[:self.n])
        self.x[:self.n] = np.where(nonbasic, xs, self.x[:self.n])
        self._recompute_basics()

    def basis(self) -> Basis:
        return Basis(tuple(int(v) for v in self.head), tuple(bool(b) for b in self.at_upper))

    def load_basis(self, basis: Basis):
        if len(basis.head) != self.m or len(basis.at_upper) != self.n + self.m:
            raise ValueError("basis does not match problem dimensions")
        self.head = np.array(basis.head, np.int64)
        self.at_upper = np.array(basis.at_upper, bool)
        self._rebuild_pos()
        nonbasic = self.pos < 0
        self.at_upper = np.where(np.isfinite(self.lo), self.at_upper & np.isfinite(self.hi), True)
        vals = np.where(self.at_upper, self.hi, self.lo)
        self.x = np.where(nonbasic, vals, self.x)
        self._refactor()

    # ---- internals -----------------------------------------------------------

    def _rebuild_pos(self):
        self.pos = np.full(self.n + self.m, -1, np.int64)
        self.pos[self.head] = np.arange(self.m)

    def _column(self, j: int) -> np.ndarray:
        if j < self.n:
            return self.A[:, j]
        col = np.zeros(self.m)
        col[j - self.n] = -1.0
        return col

    def _slack_basis(self):
        self.head = np.arange(self.n, self.n + self.m)
        self._rebuild_pos()
        self.x[:self.n] = np.where(self.at_upper[:self.n], self.hi[:self.n], self.lo[:self.n])
        self.at_upper[self.n:] = False
        self.Binv = -np.eye(self.m)
        self._recompute_basics()

    def _refactor(self):
        if self.m == 0:
            self.Binv = np.zeros((0, 0))
            return
        B = np.zeros((self.m, self.m))
        struct = self.head < self.n
        B[:, struct] = self.A[:, self.head[struct]]
        rows = self.head[~struct] - self.n
        B[rows, np.nonzero(~struct)[0]] = -1.0
        try:
            self.Binv = np.linalg.inv(B)
            if not np.all(np.isfinite(self.Binv)):
                raise np.linalg.LinAlgError("non-finite basis inverse")
        except np.linalg.LinAlgError:
            log.debug("basis singular or ill-conditioned; resetting to slack basis")
            self._slack_basis()
            return
        self._since_refactor = 0
        self._recompute_basics()

    def _recompute_basics(self):
        if self.m == 0:
            return
        nonbasic = self.pos < 0
        xs = np.where(nonbasic[:self.n], self.x[:self.n], 0.0)
        rhs = self.A @ xs
        row_nb = nonbasic[self.n:]
        rhs[row_nb] -= self.x[self.n:][row_nb]
        self.x[self.head] = self.Binv @ (-rhs)

    # ---- solve -----------------------------------------------------------------

    def solve(self) -> LpResult:
        n, tol = self.n, FEAS_TOL
        iters = 0
        degenerate = 0
        bland = False
        verified = False
        while True:
            if iters >= self.max_iter:
                raise LpStalled(f"simplex stalled after {iters} pivots")
            m = self.m
            head = self.head
            xB = self.x[head]
            loB, hiB = self.lo[head], self.hi[head]
            below = xB < loB - tol
            above = xB > hiB + tol
            phase1 = bool(below.any() or above.any())
            if phase1:
                cB = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                cN_struct = np.zeros(n)
            else:
                cB = np.where(head < n, self.c[np.minimum(head, n - 1)], 0.0) if m else np.zeros(0)
                cN_struct = self.c
            y = cB @ self.Binv if m else np.zeros(0)
            d = np.empty(n + m)
            d[:n] = cN_struct - (y @ self.A if m else 0.0)
            d[n:] = y
            movable = (self.pos < 0) & (self.hi > self.lo)
            up = movable & ~self.at_upper & (d < -OPT_TOL)
            down = movable & self.at_upper & (d > OPT_TOL)
            eligible = up | down
            if not eligible.any():
                if not verified:
                    self._refactor()
                    verified = True
                    continue
                if phase1:
                    infeas = float(np.sum(np.maximum(loB - xB, 0) + np.maximum(xB - hiB, 0)))
                    return self._result(INFEASIBLE, iters, infeas)
                return self._result(OPTIMAL, iters)
            verified = False
            cand = np.nonzero(eligible)[0]
            if bland:
                q = int(cand[0])
            else:
                q = int(cand[np.argmax(np.abs(d[cand]))])
            direction = 1.0 if up[q] else -1.0
            if q < n:
                alpha = self.Binv @ self.A[:, q]
            else:
                alpha = -self.Binv[:, q - n]
            delta = -direction * alpha
            t, p, target = self._ratio_test(delta, xB, loB, hiB, phase1, bland)
            span = self.hi[q] - self.lo[q]
            if span <= t:
                t, p = span, -1
            if not np.isfinite(t):
                raise LpInternalError("unbounded direction in a box-bounded LP")
            iters += 1
            self.total_iterations += 1
            self.x[q] += direction * t
            if m:
                self.x[head] = xB + delta * t
            if p < 0:
                self.at_upper[q] = not self.at_upper[q]
                self.x[q] = self.hi[q] if self.at_upper[q] else self.lo[q]
            else:
                leaving = int(head[p])
                self.x[leaving] = target
                self.at_upper[leaving] = bool(target == self.hi[leaving] and
                                              self.hi[leaving] > self.lo[leaving])
                self._pivot(p, q, alpha)
            if t <= 1e-12:
                degenerate += 1
                if degenerate >= DEGENERATE_LIMIT and not bland:
                    log.debug("switching to Bland's rule after %d degenerate pivots", degenerate)
                    bland = True
            else:
                degenerate = 0
                bland = False
            if self._since_refactor >= REFACTOR_EVERY:
                self._refactor()

    def _ratio_test(self, delta, xB, loB, hiB, phase1, bland):
        """Two-pass (Harris) ratio test. Returns (step, leaving position, leaving value)."""
        tol = FEAS_TOL
        if len(delta) == 0:
            return np.inf, -1, 0.0
        dec = delta < -PIVOT_TOL
        inc = delta > PIVOT_TOL
        target = np.full(len(delta), np.nan)
        # decreasing basics stop at hi if currently above it, else at lo if feasible
        dec_above = dec & (xB > hiB + tol)
        dec_feas = dec & ~dec_above & (xB >= loB - tol)
        inc_below = inc & (xB < loB - tol)
        inc_feas = inc & ~inc_below & (xB <= hiB + tol)
        target[dec_above] = hiB[dec_above]
        target[dec_feas] = loB[dec_feas]
        target[inc_below] = loB[inc_below]
        target[inc_feas] = hiB[inc_feas]
        ok = np.isfinite(target)
        if not ok.any():
            return np.inf, -1, 0.0
        idx = np.nonzero(ok)[0]
        rate = np.abs(delta[idx])
        gap = np.maximum(np.where(delta[idx] < 0, xB[idx] - target[idx], target[idx] - xB[idx]), 0.0)
        # pass one: relaxed step bound
        relaxed = (gap + HARRIS_TOL) / rate
        tmax = float(relaxed.min())
        exact = gap / rate
        within = exact <= tmax
        cand = idx[within]
        if bland:
            var = self.head[cand]
            p = int(cand[np.argmin(var)])
        else:
            rr = np.abs(delta[cand])
            p = int(cand[np.argmax(rr)])
        k = int(np.nonzero(idx == p)[0][0])
        t = max(0.0, float(exact[k]))
        return t, p, float(target[p])

    def _pivot(self, p: int, q: int, alpha: np.ndarray):
        piv = alpha[p]
        row = self.Binv[p] / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[p] = row
        leaving = int(self.head[p])
        self.pos[leaving] = -1
        self.head[p] = q
        self.pos[q] = p
        self._since_refactor += 1

    def _result(self, status: str, iters: int, infeas: float = 0.0) -> LpResult:
        xs = np.clip(self.x[:self.n], self.lo[:self.n], self.hi[:self.n])
        obj = float(self.c @ xs) if status == OPTIMAL else np.inf
        return LpResult(status, obj, xs.copy(), self.basis(), iters, infeas,
                        self.A @ xs if self.m else np.zeros(0))


def solve_lp(prob: LpProblem, warm: Basis | None = None, max_iter: int = MAX_ITER) -> LpResult:
    lp = SimplexLP.from_problem(prob, max_iter=max_iter)
    if warm is not None:
        lp.load_basis(warm)
    return lp.solve()


def add_rows_resolve(lp: SimplexLP, rows: Sequence[LinearRow]) -> LpResult:
    """Append rows to a solved context and re-solve from the current basis."""
    lp.add_rows(rows)
    return lp.solve()
