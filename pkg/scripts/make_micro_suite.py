"""Write the seeded micro instances to instances/ together with a suite file for calibrate/compare."""
import argparse
from pathlib import Path

from rsabc.bench import MicroSuiteSpec, micro_suite, write_suite
from rsabc.instance import serialize_instance

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=24)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--dir", default=str(ROOT / "instances"))
    ap.add_argument("--fixtures", default="INST-A,INST-B,INST-C", help="fixtures appended to the suite")
    args = ap.parse_args()
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, inst in enumerate(micro_suite(MicroSuiteSpec(count=args.count, seed=args.seed))):
        name = f"micro-{k:02d}.rsa"
        (out / name).write_text(serialize_instance(inst))
        entries.append((name, k))
    entries += [(f, 0) for f in args.fixtures.split(",") if f]
    write_suite(out / "micro.suite", entries)
    print(f"wrote {len(entries)} suite entries to {out / 'micro.suite'}")


if __name__ == "__main__":
    main()
