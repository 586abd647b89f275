"""Sweep the violation threshold of one or more families over a suite and write one CSV per family."""
import argparse
from pathlib import Path

from rsabc.bench import DEFAULT_EPS_GRID, calibrate_eps, calibration_summary, load_suite, write_calibration_csv
from rsabc.config import SolverConfig
from rsabc.cuts import resolve_families

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--suite", default=str(ROOT / "instances/micro.suite"))
    ap.add_argument("--families", default="nonOverBySum,farSlotsOff,contiguityIneqs")
    ap.add_argument("--runs", type=int, default=3)
    ap.add_argument("--time-limit", type=float, default=0.5, help="minutes per solve")
    ap.add_argument("--out-dir", default=str(ROOT / "results"))
    args = ap.parse_args()
    suite = load_suite(args.suite)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = SolverConfig(time_limit=args.time_limit)
    for fam in resolve_families(args.families):
        rows = calibrate_eps(suite, fam, DEFAULT_EPS_GRID, base, args.runs)
        write_calibration_csv(out / f"calibration-{fam}.csv", rows)
        s = calibration_summary(rows)
        print(f"{fam}: best={s['best']:.4f} worst={s['worst']:.4f} mean={s['mean']:.4f} "
              f"median={s['median']:.4f} best_eps={s['best_eps']:.1f} cuts={s['best_cuts']}")


if __name__ == "__main__":
    main()
