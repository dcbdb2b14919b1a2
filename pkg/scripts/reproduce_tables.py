#!/usr/bin/env python3
"""Re-execute the golden command tables and print the pass/fail matrix.

``--write-table1 DIR`` also regenerates the one-qubit closed-form files.
"""

import argparse
import sys
from pathlib import Path

from qmlang.compiler import closed_form_command
from qmlang.corpus import check_corpus, format_report
from qmlang.qml import dump


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", type=Path, default=None)
    ap.add_argument("--factor", type=float, default=3.0, help="allowed f_test ratio either way")
    ap.add_argument("--write-table1", type=Path, metavar="DIR")
    args = ap.parse_args()

    if args.write_table1:
        args.write_table1.mkdir(parents=True, exist_ok=True)
        for gate in ("not", "sqrt-not", "had", "phs"):
            path = args.write_table1 / f"table1_{gate}.qml"
            dump(closed_form_command(gate), path)
            print(f"wrote {path}")

    checks = check_corpus(args.corpus, factor=args.factor)
    print(format_report(checks))
    return 0 if all(c.passed for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
