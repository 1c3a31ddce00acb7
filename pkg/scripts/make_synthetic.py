#!/usr/bin/env python3
"""Generate a synthetic clustered dataset of near-product-state vectors.

Each cluster centroid is a real product state: per qubit an angle a_q drawn
as pi/4 + U(-spread, spread), giving the amplitude pair (cos a_q, sin a_q).
Samples add small Gaussian coordinate noise around their centroid. Rows are
written unnormalized; the prepare command normalizes them.

Product states have flat total magnitude across signed amplitudes, so the
trained ansatz can reach them exactly; spread controls how far centroids
sit from the all-angles-pi/4 uniform vector, and sigma controls how tightly
samples hug their centroid (and with it the achievable cluster floor).
"""

import argparse
import csv
import sys

import numpy as np


def product_state(angles: np.ndarray) -> np.ndarray:
    state = np.array([1.0])
    for a in reversed(angles):
        state = np.kron(state, np.array([np.cos(a), np.sin(a)]))
    return state


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out", help="CSV path to write")
    parser.add_argument("--qubits", type=int, default=4)
    parser.add_argument("--clusters", type=int, default=3)
    parser.add_argument("--per-cluster", type=int, default=20)
    parser.add_argument("--spread", type=float, default=0.2,
                        help="centroid angle half-range around pi/4")
    parser.add_argument("--sigma", type=float, default=0.01,
                        help="per-coordinate sample noise")
    parser.add_argument("--ambient-dims", type=int, default=None,
                        help="embed rows into this many dims via a random "
                             "orthogonal map (exercises the PCA step)")
    parser.add_argument("--labels", action="store_true",
                        help="append the cluster id as a label column")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    dims = 1 << args.qubits
    rng = np.random.default_rng(args.seed)

    rows = []
    labels = []
    for cid in range(args.clusters):
        angles = np.pi / 4 + rng.uniform(-args.spread, args.spread, size=args.qubits)
        centroid = product_state(angles)
        for _ in range(args.per_cluster):
            rows.append(centroid + rng.normal(0.0, args.sigma, size=dims))
            labels.append(cid)
    data = np.array(rows)

    if args.ambient_dims is not None:
        if args.ambient_dims < dims:
            parser.error(f"ambient dims must be >= {dims}")
        q, _ = np.linalg.qr(rng.normal(size=(args.ambient_dims, dims)))
        data = data @ q.T

    order = rng.permutation(len(data))
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i in order:
            row = [repr(float(v)) for v in data[i]]
            if args.labels:
                row.append(labels[i])
            writer.writerow(row)
    print(f"wrote {len(data)} rows x {data.shape[1]} dims "
          f"({args.clusters} clusters) -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
