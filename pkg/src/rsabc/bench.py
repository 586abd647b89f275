"""Benchmark harness: the tau score, epsilon calibration, strategy comparison and suites."""
from __future__ import annotations

import csv
import hashlib
import statistics
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .bnc import FEASIBLE, INFEASIBLE_STATUS, NO_SOLUTION, OPTIMAL, SolveResult, solve_bnc
from .config import SolverConfig
from .fixtures import NAMES as FIXTURE_NAMES, fixture
from .instance import GeneratorError, GeneratorParams, Instance, generate_instance, load_instance
from .oracle import OracleLimitError, enumerate_canonical

SOLVED, FEASIBLE_TIMEOUT, NO_SOLUTION_TIMEOUT = "Solved", "FeasibleTimeout", "NoSolutionTimeout"
OUTCOMES = (SOLVED, FEASIBLE_TIMEOUT, NO_SOLUTION_TIMEOUT)
DEFAULT_EPS_GRID = tuple(round(0.1 * k, 1) for k in range(21))
DEFAULT_H_GRID = (5, 10, 15, 20, 25, 30)
PLAIN_BB = "B&B"


@dataclass(frozen=True)
class TauInput:
    t: float          # minutes
    g: float          # gap in [0, 1]
    outcome: str

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.t < 0:
            raise ValueError("time must be non-negative")
        if not 0.0 <= self.g <= 1.0:
            raise ValueError("gap must lie in [0, 1]")
        if self.outcome == SOLVED and self.g != 0.0:
            raise ValueError("a solved run has gap 0")


def compute_tau(inp: TauInput) -> float:
    """t when solved; timeouts add a quarter of t, scaled by the gap or four times over."""
    p = inp.t / 4.0
    if inp.outcome == SOLVED:
        return inp.t
    if inp.outcome == FEASIBLE_TIMEOUT:
        return inp.t + p + inp.g * p
    return inp.t + 4.0 * p


def tau_input(result: SolveResult) -> TauInput:
    if result.status in (OPTIMAL, INFEASIBLE_STATUS):
        return TauInput(result.wall_minutes, 0.0, SOLVED)
    if result.status == FEASIBLE:
        return TauInput(result.wall_minutes, result.gap, FEASIBLE_TIMEOUT)
    if result.status == NO_SOLUTION:
        return TauInput(result.wall_minutes, 1.0, NO_SOLUTION_TIMEOUT)
    raise ValueError(f"unknown status {result.status!r}")


def config_digest(cfg: SolverConfig) -> str:
    data = asdict(cfg)
    text = repr(sorted((k, repr(v)) for k, v in data.items()))
    return hashlib.sha1(text.encode()).hexdigest()[:12]


@dataclass
class RunRecord:
    instance: str
    digest: str
    result: SolveResult
    tau: float

    @property
    def timed_out(self) -> bool:
        return self.result.timed_out


@dataclass
class SuiteEntry:
    name: str
    inst: Instance
    seed: int = 0


def load_suite(path) -> list[SuiteEntry]:
    """Lines ``<instance path or fixture name> <seed>``; relative paths resolve from the file."""
    base = Path(path).parent
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2:
            raise ValueError(f"{path}:{lineno}: expected '<instance> [seed]'")
        seed = int(parts[1]) if len(parts) == 2 else 0
        ref = parts[0]
        if ref in FIXTURE_NAMES:
            inst = fixture(ref)
        else:
            p = Path(ref)
            inst = load_instance(p if p.is_absolute() else base / p)
        out.append(SuiteEntry(inst.name or ref, inst, seed))
    if not out:
        raise ValueError(f"{path}: empty suite")
    return out


def write_suite(path, entries: Iterable[tuple[str, int]]):
    Path(path).write_text("".join(f"{ref} {seed}\n" for ref, seed in entries))


@dataclass(frozen=True)
class MicroSuiteSpec:
    """Parameters of the seeded micro-instance generator used for oracle comparisons."""
    count: int = 24
    seed: int = 2024
    min_nodes: int = 4
    max_nodes: int = 6
    max_arcs: int = 10
    demands: int = 3
    vmax: int = 3
    min_slots: int = 4
    max_slots: int = 6
    max_solutions: int = 20_000


def oracle_sized(spec: MicroSuiteSpec) -> Callable[[Instance], bool]:
    """Accept instances whose canonical solutions can be enumerated within ``spec.max_solutions``."""
    def accept(inst: Instance) -> bool:
        try:
            enumerate_canonical(inst, max_solutions=spec.max_solutions)
        except OracleLimitError:
            return False
        return True
    return accept


def micro_suite(spec: MicroSuiteSpec = MicroSuiteSpec(),
                accept: Callable[[Instance], bool] | None = None) -> list[Instance]:
    """Deterministic list of small random instances.

    ``accept`` filters candidates; by default only oracle-sized instances are kept.
    """
    accept = accept or oracle_sized(spec)
    out: list[Instance] = []
    attempt = 0
    while len(out) < spec.count:
        attempt += 1
        if attempt > 100 * spec.count:
            raise RuntimeError("micro suite generation did not converge")
        rng = np.random.default_rng([spec.seed, attempt])
        n = int(rng.integers(spec.min_nodes, spec.max_nodes + 1))
        arcs = min(spec.max_arcs, n * (n - 1))
        params = GeneratorParams(n, min(1.0, arcs / (n * (n - 1)) + 1e-9), spec.demands, 1, spec.vmax,
                                 int(rng.integers(spec.min_slots, spec.max_slots + 1)),
                                 seed=int(rng.integers(2**31)))
        try:
            inst = generate_instance(params)
        except GeneratorError:
            continue
        if accept(inst):
            out.append(inst)
    return out


def run_best_of(inst: Instance, cfg: SolverConfig, runs: int, name: str = "") -> RunRecord:
    """Run ``runs`` times and keep the record with the smallest tau."""
    best = None
    for _ in range(max(1, runs)):
        res = solve_bnc(inst, cfg)
        rec = RunRecord(name or inst.name, config_digest(cfg), res, compute_tau(tau_input(res)))
        if best is None or rec.tau < best.tau:
            best = rec
    return best


@dataclass
class CalibrationRow:
    family: str
    eps: float
    sum_tau: float
    cuts: int
    taus: list[float] = field(default_factory=list)


def calibrate_eps(suite: Sequence[SuiteEntry], family: str, grid: Sequence[float] = DEFAULT_EPS_GRID,
                  base: SolverConfig | None = None, runs: int = 3) -> list[CalibrationRow]:
    """Sum of best-of-``runs`` tau per epsilon, with only ``family`` enabled."""
    if not suite:
        raise ValueError("empty suite")
    base = base or SolverConfig()
    rows = []
    for eps in grid:
        taus, cuts = [], 0
        for entry in suite:
            cfg = base.updated(families=(family,), eps={family: float(eps)}, seed=entry.seed)
            rec = run_best_of(entry.inst, cfg, max(3, runs), entry.name)
            taus.append(rec.tau)
            cuts += rec.result.total_cuts
        rows.append(CalibrationRow(family, float(eps), float(sum(taus)), cuts, taus))
    return rows


def calibration_summary(rows: Sequence[CalibrationRow]) -> dict[str, float]:
    """Best/worst/mean/median of the summed tau across the grid, plus the best epsilon."""
    sums = [r.sum_tau for r in rows]
    best = min(rows, key=lambda r: (r.sum_tau, r.eps))
    return {"best": min(sums), "worst": max(sums), "mean": statistics.fmean(sums),
            "median": statistics.median(sums), "best_eps": best.eps, "best_cuts": best.cuts}


@dataclass
class ComparisonRow:
    strategy: str
    h: int | None
    sum_tau: float
    timeouts: int
    taus: dict[str, float] = field(default_factory=dict)


def compare_strategies(suite: Sequence[SuiteEntry], strategies: Sequence[str],
                       h_grid: Sequence[int] = DEFAULT_H_GRID, time_limit: float | None = 0.5,
                       base: SolverConfig | None = None, runs: int = 2,
                       include_plain: bool = True) -> list[ComparisonRow]:
    """Best-of-``runs`` tau per (strategy, h), dropping instances where every configuration timed out."""
    if not suite:
        raise ValueError("empty suite")
    base = (base or SolverConfig()).updated(time_limit=time_limit)
    configs: list[tuple[str, int | None, SolverConfig]] = []
    if include_plain:
        configs.append((PLAIN_BB, None, base.updated(families=())))
    for strat in strategies:
        for h in h_grid:
            configs.append((strat, h, base.updated(strategy=strat, h=h)))
    records: dict[tuple[int, int], RunRecord] = {}
    for ci, (_, _, cfg) in enumerate(configs):
        for ei, entry in enumerate(suite):
            records[ci, ei] = run_best_of(entry.inst, cfg.updated(seed=entry.seed), max(2, runs),
                                          entry.name)
    kept = [ei for ei in range(len(suite))
            if not all(records[ci, ei].timed_out for ci in range(len(configs)))]
    rows = []
    for ci, (strat, h, _) in enumerate(configs):
        taus = {suite[ei].name: records[ci, ei].tau for ei in kept}
        rows.append(ComparisonRow(strat, h, float(sum(taus.values())),
                                  sum(records[ci, ei].timed_out for ei in kept), taus))
    return rows


def write_calibration_csv(path, rows: Sequence[CalibrationRow]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["family", "eps", "sum_tau", "cuts"])
        for r in rows:
            w.writerow([r.family, f"{r.eps:.1f}", f"{r.sum_tau:.6f}", r.cuts])


def write_comparison_csv(path, rows: Sequence[ComparisonRow]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["strategy", "h", "sum_tau", "timeouts"])
        for r in rows:
            w.writerow([r.strategy, "" if r.h is None else r.h, f"{r.sum_tau:.6f}", r.timeouts])
