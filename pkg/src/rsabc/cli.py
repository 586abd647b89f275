"""Command-line entry point: ``rsabc <command> ...``.

Exit codes: 0 success or Optimal, 1 Infeasible, 2 timeout, 3 usage error, 4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import bench
from .bnc import FEASIBLE, INFEASIBLE_STATUS, NO_SOLUTION, SolveResult, solve_bnc
from .config import SolverConfig, load_config_file, parse_eps
from .cuts.base import CutContext
from .cuts.registry import FAMILIES, resolve_families
from .fixtures import NAMES as FIXTURE_NAMES, fixture
from .instance import (CanonicalSolution, GeneratorError, GeneratorParams, Instance,
                       generate_instance, load_instance, serialize_instance)
from .oracle import OracleLimitError, audit_rows, family_witness, oracle_table
from .rows import EQUATION, VALID, format_row
from .strategy import load_presort, strategy_from_name

EXIT_OK, EXIT_INFEASIBLE, EXIT_TIMEOUT, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _as_usage:
    """Turn input-validation errors raised inside the block into UsageError."""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None and issubclass(exc_type, (ValueError, KeyError, OSError)):
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            raise UsageError(str(msg)) from exc
        return False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x: float | None) -> str:
    if x is None:
        return "none"
    return f"{x:.10g}"


def solution_lines(inst: Instance, sol: CanonicalSolution) -> list[str]:
    """One ``d <index> path <arcs> slots <l> <r>`` line per demand."""
    out = []
    for d, (path, l) in enumerate(zip(sol.paths, sol.starts)):
        r = l + inst.demands[d].volume - 1
        out.append(f"d {d} path {' '.join(map(str, path))} slots {l} {r}")
    return out


def resolve_instance(ref: str) -> Instance:
    if ref in FIXTURE_NAMES:
        return fixture(ref)
    p = Path(ref)
    if not p.is_file():
        raise UsageError(f"no such instance file or fixture: {ref}")
    with _as_usage():
        return load_instance(p)


# ---- argument parsing ---------------------------------------------------------------

def _solver_options() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("solver options")
    g.add_argument("--config", help="key=value config file; flags override it")
    g.add_argument("--time-limit", type=float, help="minutes per solve")
    g.add_argument("--strategy", help="brute-force, rnd, eff, eff-rnd or weighted")
    g.add_argument("--h", type=int, help="stop a round after this many productive families")
    g.add_argument("--eps", action="append", default=None, metavar="FAMILY=VAL",
                   help="violation threshold for one family (repeatable)")
    g.add_argument("--families", help="all, none, or a comma-separated list of families")
    g.add_argument("--seed", type=int, help="non-negative seed")
    g.add_argument("--no-optimality-cuts", action="store_true", default=None,
                   help="separate only valid families")
    g.add_argument("--no-static-rows", action="store_true", default=None,
                   help="separate the static families instead of installing them")
    g.add_argument("--presort", help="family order file or effectiveness CSV")
    g.add_argument("--max-nodes", type=int)
    return p


def build_config(args) -> SolverConfig:
    with _as_usage():
        return _build_config(args)


def _build_config(args) -> SolverConfig:
    cfg = load_config_file(args.config) if getattr(args, "config", None) else SolverConfig()
    kw = {}
    if args.time_limit is not None:
        kw["time_limit"] = args.time_limit
    if args.strategy is not None:
        kw["strategy"] = args.strategy
    if args.h is not None:
        kw["h"] = args.h
    if args.eps:
        kw["eps"] = {**cfg.eps, **parse_eps(args.eps)}
    if args.families is not None:
        kw["families"] = None if args.families.strip() == "all" else tuple(resolve_families(args.families))
    if args.seed is not None:
        if args.seed < 0 or args.seed >= 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        kw["seed"] = args.seed
    if args.no_optimality_cuts:
        kw["use_optimality_cuts"] = False
    if args.no_static_rows:
        kw["static_rows"] = False
    if args.presort is not None:
        kw["presort"] = load_presort(args.presort)
    if args.max_nodes is not None:
        kw["max_nodes"] = args.max_nodes
    return cfg.updated(**kw) if kw else cfg


def make_parser() -> argparse.ArgumentParser:
    solver = _solver_options()
    p = _Parser(prog="rsabc", description="Branch-and-cut for routing and spectrum allocation.")
    p.add_argument("--log-level", default="WARNING", help="logging level for stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--demands", type=int, required=True)
    g.add_argument("--vmin", type=int, default=1)
    g.add_argument("--vmax", type=int, required=True)
    g.add_argument("--slots", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="instance file (default stdout)")

    s = sub.add_parser("solve", parents=[solver], help="solve an instance by branch-and-cut")
    s.add_argument("instance", help="instance file or fixture name")
    s.add_argument("--out", help="write the solution lines here")

    a = sub.add_parser("audit", help="check family rows against every canonical solution")
    a.add_argument("instance")
    a.add_argument("--families", default="all")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", help="audit CSV (default stdout)")

    w = sub.add_parser("witness", help="search an LP point showing one family is not implied")
    w.add_argument("instance")
    w.add_argument("--target", required=True, help="family whose rows should be violated")
    w.add_argument("--base", default="", help="comma-separated families added to the model rows")
    w.add_argument("--no-model", action="store_true", help="leave the model rows out of the base")
    w.add_argument("--max-targets", type=int, default=200)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", help="write the witness as JSON")

    c = sub.add_parser("calibrate", parents=[solver], help="sweep the threshold of one family")
    c.add_argument("suite", help="suite file of '<instance> <seed>' lines")
    c.add_argument("--family", required=True)
    c.add_argument("--grid", help="comma-separated thresholds (default 0.0..2.0 step 0.1)")
    c.add_argument("--runs", type=int, default=3)
    c.add_argument("--out", help="calibration CSV")

    m = sub.add_parser("compare", parents=[solver], help="compare strategies and plain B&B")
    m.add_argument("suite")
    m.add_argument("--strategies", default="brute-force,rnd,eff,eff-rnd,weighted")
    m.add_argument("--h-grid", default=",".join(map(str, bench.DEFAULT_H_GRID)))
    m.add_argument("--runs", type=int, default=2)
    m.add_argument("--out", help="comparison CSV")

    o = sub.add_parser("oracle", help="exact optimum by enumeration")
    o.add_argument("instance")
    o.add_argument("--max-solutions", type=int, default=100_000)
    return p


# ---- commands ---------------------------------------------------------------------

def _status_code(status: str) -> int:
    if status == INFEASIBLE_STATUS:
        return EXIT_INFEASIBLE
    if status in (FEASIBLE, NO_SOLUTION):
        return EXIT_TIMEOUT
    return EXIT_OK


def summary_lines(inst: Instance, res: SolveResult) -> list[str]:
    """Deterministic summary; wall time is left out on purpose."""
    lines = [f"instance {inst.name}", f"status {res.status}", f"objective {_fmt(res.objective)}",
             f"bound {_fmt(res.bound)}", f"gap {res.gap:.6f}", f"nodes {res.nodes}",
             f"cuts {res.total_cuts}"]
    lines += [f"cuts.{fam} {n}" for fam, n in res.cuts_by_family.items() if n]
    if res.solution is not None:
        lines += solution_lines(inst, res.solution)
    return lines


def cmd_gen(args, out) -> int:
    params = GeneratorParams(args.nodes, args.density, args.demands, args.vmin, args.vmax,
                             args.slots, args.seed)
    try:
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = serialize_instance(generate_instance(params))
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}", file=out)
    else:
        out.write(text)
    return EXIT_OK


def cmd_solve(args, out) -> int:
    inst = resolve_instance(args.instance)
    res = solve_bnc(inst, build_config(args))
    for line in summary_lines(inst, res):
        print(line, file=out)
    if args.out:
        body = solution_lines(inst, res.solution) if res.solution is not None else []
        Path(args.out).write_text("".join(line + "\n" for line in body))
    return _status_code(res.status)


def cmd_audit(args, out) -> int:
    inst = resolve_instance(args.instance)
    table = oracle_table(inst)
    ctx = CutContext(inst, seed=args.seed)
    records = []
    with _as_usage():
        families = resolve_families(args.families)
    for fam in families:
        kind = FAMILIES[fam].kind
        rows = ctx.block(fam).rows()
        ok = audit_rows(table, rows)
        if kind in (VALID, EQUATION):
            passed = ok.all(axis=0)
        else:
            passed = (ok & table.optimal_mask[:, None]).any(axis=0) if table.solutions else ok.all(axis=0)
        records.append((fam, inst.name, len(rows), int((~passed).sum())))
    fh = open(args.out, "w", newline="") if args.out else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "instance", "cuts_audited", "failures"])
        w.writerows(records)
    finally:
        if args.out:
            fh.close()
    failures = sum(r[3] for r in records)
    print(f"solutions {len(table.solutions)} failures {failures}", file=sys.stderr)
    return EXIT_OK


def cmd_witness(args, out) -> int:
    inst = resolve_instance(args.instance)
    with _as_usage():
        target = resolve_families([args.target])[0]
        base = resolve_families(args.base) if args.base.strip() else []
    wit = family_witness(inst, target, base, include_model=not args.no_model,
                         max_targets=args.max_targets, seed=args.seed)
    if wit is None:
        print("witness none", file=out)
        return EXIT_OK
    point = {int(i): round(float(x), 9) for i, x in enumerate(wit.result.point) if abs(x) > 1e-9}
    print(f"witness found violation {wit.result.violation:.6f}", file=out)
    print(f"target {format_row(wit.target)}", file=out)
    for i, x in point.items():
        print(f"x {i} {x:.6g}", file=out)
    if args.out:
        Path(args.out).write_text(json.dumps({
            "instance": serialize_instance(inst), "target_family": target, "base_families": base,
            "include_model": not args.no_model,
            "target": {"coeffs": [[int(i), float(c)] for i, c in wit.target.coeffs],
                       "sense": wit.target.sense, "rhs": wit.target.rhs},
            "violation": wit.result.violation, "point": point}, indent=1))
    return EXIT_OK


def _load_suite(path):
    with _as_usage():
        return bench.load_suite(path)


def cmd_calibrate(args, out) -> int:
    suite = _load_suite(args.suite)
    with _as_usage():
        family = resolve_families([args.family])[0]
        grid = [float(x) for x in args.grid.split(",")] if args.grid else bench.DEFAULT_EPS_GRID
    rows = bench.calibrate_eps(suite, family, grid, build_config(args), args.runs)
    for r in rows:
        print(f"{r.family} eps={r.eps:.1f} sum_tau={r.sum_tau:.2f} cuts={r.cuts}", file=out)
    s = bench.calibration_summary(rows)
    print(f"best={s['best']:.2f} worst={s['worst']:.2f} mean={s['mean']:.2f} "
          f"median={s['median']:.2f} best_eps={s['best_eps']:.1f}", file=out)
    if args.out:
        bench.write_calibration_csv(args.out, rows)
    return EXIT_OK


def cmd_compare(args, out) -> int:
    suite = _load_suite(args.suite)
    cfg = build_config(args)
    with _as_usage():
        strategies = [strategy_from_name(x) for x in args.strategies.split(",") if x.strip()]
        h_grid = [int(x) for x in args.h_grid.split(",")]
    rows = bench.compare_strategies(suite, strategies, h_grid, cfg.time_limit, cfg, args.runs)
    for r in rows:
        h = "-" if r.h is None else r.h
        print(f"{r.strategy} h={h} sum_tau={r.sum_tau:.2f} timeouts={r.timeouts}", file=out)
    if args.out:
        bench.write_comparison_csv(args.out, rows)
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    inst = resolve_instance(args.instance)
    try:
        table = oracle_table(inst, max_solutions=args.max_solutions)
    except OracleLimitError as exc:
        raise UsageError(f"instance too large for the oracle: {exc}") from None
    print(f"instance {inst.name}", file=out)
    print(f"solutions {len(table.solutions)}", file=out)
    if not table.solutions:
        print("status Infeasible", file=out)
        return EXIT_INFEASIBLE
    print(f"objective {table.optimum}", file=out)
    print(f"optimal_solutions {int(table.optimal_mask.sum())}", file=out)
    first = table.solutions[int(table.optimal_mask.argmax())]
    for line in solution_lines(inst, first):
        print(line, file=out)
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "audit": cmd_audit, "witness": cmd_witness,
            "calibrate": cmd_calibrate, "compare": cmd_compare, "oracle": cmd_oracle}


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args, out)
    except SystemExit as exc:      # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (UsageError, GeneratorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:       # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
