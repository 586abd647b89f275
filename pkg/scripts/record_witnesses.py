"""Search and store LP witnesses showing that several cut families are not implied by weaker systems.

Writes tests/fixtures/witnesses.json; the acceptance suite re-verifies every stored point.
"""
import argparse
import json
from pathlib import Path

from rsabc.bench import MicroSuiteSpec, micro_suite
from rsabc.fixtures import fixture
from rsabc.instance import serialize_instance
from rsabc.oracle import family_witness

CLAIMS = [
    # (label, instance, target family, base families on top of the model rows)
    ("notBranchFromSrc-vs-exactlyVdFromSrc", "INST-A", "notBranchFromSrc", ["exactlyVdFromSrc"]),
    ("notBranchFromV-vs-exactlyVdFromV", "RING-4", "notBranchFromV", ["exactlyVdFromV"]),
    ("farSlotsOff-vs-contiguity-rows", "micro:6:2", "farSlotsOff",
     ["exactlyVdFromV", "contiguityEqs", "ppalSlotsFromSrc"]),
    ("kDemandsNotExceed-vs-nonOverBySum", "DIAMOND-2D", "kDemandsNotExceed",
     ["nonOverBySum", "exactlyVdFromV"]),
]


def resolve(ref: str):
    if ref.startswith("micro:"):
        _, count, k = ref.split(":")
        return micro_suite(MicroSuiteSpec(count=int(count)))[int(k)]
    return fixture(ref)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/fixtures/witnesses.json"))
    args = ap.parse_args()
    records = []
    for label, ref, target, base in CLAIMS:
        inst = resolve(ref)
        wit = family_witness(inst, target, base)
        if wit is None:
            raise SystemExit(f"{label}: no witness on {inst.name}")
        records.append({
            "label": label, "instance_ref": ref, "instance": serialize_instance(inst),
            "target_family": target, "base_families": base,
            "target": {"coeffs": [[int(i), float(c)] for i, c in wit.target.coeffs],
                       "sense": wit.target.sense, "rhs": wit.target.rhs},
            "violation": wit.result.violation,
            "point": {str(i): float(x) for i, x in enumerate(wit.result.point) if abs(x) > 1e-12},
        })
        print(f"{label}: {inst.name} violation {wit.result.violation:.6f} (row {wit.tried})")
    Path(args.out).write_text(json.dumps(records, indent=1) + "\n")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
