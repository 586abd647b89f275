"""Compare every separation strategy over the h grid against plain branch-and-bound."""
import argparse
from pathlib import Path

from rsabc.bench import DEFAULT_H_GRID, compare_strategies, load_suite, write_comparison_csv
from rsabc.strategy import CLI_NAMES

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--suite", default=str(ROOT / "instances/micro.suite"))
    ap.add_argument("--time-limit", type=float, default=0.5, help="minutes per solve")
    ap.add_argument("--runs", type=int, default=2)
    ap.add_argument("--out", default=str(ROOT / "results/comparison.csv"))
    args = ap.parse_args()
    rows = compare_strategies(load_suite(args.suite), list(CLI_NAMES), DEFAULT_H_GRID,
                              args.time_limit, runs=args.runs)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_comparison_csv(args.out, rows)
    for r in sorted(rows, key=lambda r: r.sum_tau):
        h = "-" if r.h is None else r.h
        print(f"{r.strategy:12s} h={h!s:3s} sum_tau={r.sum_tau * 60:8.3f}s timeouts={r.timeouts}")


if __name__ == "__main__":
    main()
