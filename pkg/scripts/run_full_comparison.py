#!/usr/bin/env python3
"""Run the whole comparison on fresh synthetic data: generate, prepare,
train, compare.

Everything lands under --out: the raw and prepared CSVs, the trained
library, report.json / report.csv, and the four SVG figures. The compare
step density-simulates every exact-synthesis circuit under noise, which at
the default eight qubits costs several seconds per sample; budget a few
minutes at the default sample count or lower --per-cluster for a quick look.
"""

import argparse
import os
import subprocess
import sys

from enqode.cli import main as enqode_main

HERE = os.path.dirname(os.path.abspath(__file__))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="out/full", help="artifact directory")
    parser.add_argument("--qubits", type=int, default=8)
    parser.add_argument("--layers", type=int, default=8)
    parser.add_argument("--clusters", type=int, default=3)
    parser.add_argument("--per-cluster", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--noise-p1", type=float, default=None)
    parser.add_argument("--noise-p2", type=float, default=None)
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    raw = os.path.join(args.out, "raw.csv")
    generate = [
        sys.executable, os.path.join(HERE, "make_synthetic.py"), raw,
        "--qubits", str(args.qubits),
        "--clusters", str(args.clusters),
        "--per-cluster", str(args.per_cluster),
        "--seed", str(args.seed),
    ]
    result = subprocess.run(generate)
    if result.returncode != 0:
        return result.returncode

    common = ["--qubits", str(args.qubits), "--layers", str(args.layers),
              "--seed", str(args.seed), "--out", args.out]
    if args.noise_p1 is not None:
        common += ["--noise-p1", str(args.noise_p1)]
    if args.noise_p2 is not None:
        common += ["--noise-p2", str(args.noise_p2)]

    for step in (["prepare", raw, *common],
                 ["train", *common],
                 ["compare", *common, "--jobs", str(args.jobs)]):
        code = enqode_main(step)
        if code != 0:
            print(f"step {step[0]!r} exited with {code}", file=sys.stderr)
            return code

    print(f"\nartifacts in {args.out}; try: enqode inspect {args.out}/report.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
