#!/usr/bin/env python3
"""Lie-closure dimensions of the generator sets, with an energy sweep for the device set."""

import argparse
import sys

import numpy as np

from qmlang.device import EnergyConfig
from qmlang.liealg import (
    device_generators,
    lie_closure_dim,
    reconstruction_identities,
    standard_generators,
    verify_constructions,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sweep", type=int, default=20, help="random energy triples for the device set")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for n in (1, 2, 3):
        res = lie_closure_dim(standard_generators(n))
        print(f"standard n={n}: dimension {res.dimension} of {4**n - 1}, rounds {res.rounds}")
    res = lie_closure_dim(device_generators())
    print(f"device H1..H4: dimension {res.dimension} of 15, rounds {res.rounds}")

    rng = np.random.default_rng(args.seed)
    dims = []
    for _ in range(args.sweep):
        cfg = EnergyConfig(*rng.uniform(0.05, 5.0, 3))
        dims.append(lie_closure_dim(device_generators(cfg)).dimension)
    print(f"device sweep over {args.sweep} random energies: dimensions {sorted(set(dims))}")

    for name, dev in reconstruction_identities().items():
        print(f"reconstruction {dev:.1e}  {name}")
    bad = 0
    for chk in verify_constructions():
        bad += chk.status == "failed"
        print(f"{chk.status:19s} dev {chk.deviation:.1e} flipped {chk.flipped_deviation:.1e}  {chk.name}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
