#!/usr/bin/env python3
"""Compile every library gate and write ``<gate>.qml`` plus a summary table."""

import argparse
import logging
import sys
from pathlib import Path

from qmlang.compiler import OptimizerConfig, compile1_device, compile1_embedded, compile2
from qmlang.gates import ONE_QUBIT, TWO_QUBIT, library
from qmlang.qml import dump


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("compiled"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--k", type=int, default=None, help="fixed k for embedded gates (default: scan)")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    opt = OptimizerConfig(restarts=args.restarts, seed=args.seed, workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    jobs = [(g, lambda g=g: compile2(library(g), opt=opt)) for g in TWO_QUBIT]
    jobs += [(g, lambda g=g: compile1_device(library(g), opt=opt)) for g in ONE_QUBIT]
    for side, fmt in (("second", "i-kron-{}"), ("first", "{}-kron-i")):
        jobs += [(fmt.format(w), lambda w=w, side=side: compile1_embedded(library(w), side, args.k, opt=opt))
                 for w in ONE_QUBIT]

    failed = 0
    print(f"{'gate':18s} {'f_test':>10s} {'fidelity':>14s} {'restarts':>8s} {'k':>4s} {'total':>10s} {'sec':>6s}")
    for name, job in jobs:
        res = job()
        dump(res.to_command(), args.out / f"{name}.qml")
        failed += not res.converged
        k = "-" if res.k is None else str(res.k)
        print(f"{name:18s} {res.f_test:10.2e} {res.phase_fidelity:14.12f} {res.restarts_used:8d} {k:>4s} "
              f"{res.total_time:10.4f} {res.wall_time:6.1f}{'' if res.converged else '  NOT CONVERGED'}")
    return 0 if failed == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
