"""Command-line front end: ``qmlang {compile,run,verify,closure,tables}``.

Exit codes: 0 success, 1 input error, 2 optimizer non-convergence or a
verification above threshold.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import corpus, liealg
from .compiler import OptimizerConfig, compile1_device, compile1_embedded, compile2
from .device import DEFAULT_ENERGIES, EnergyConfig
from .gates import (
    ONE_QUBIT,
    TWO_QUBIT,
    UnknownGateError,
    _embedded_parts,
    from_matrix,
    gate_names,
    library,
    parse_gate_spec,
    phase_fidelity,
)
from .qml import QMLSyntaxError, dump, execute, load

EXIT_OK, EXIT_INPUT, EXIT_FAILED = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); exit 2 is reserved for non-convergence
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def load_matrix(path) -> np.ndarray:
    """Read a raw target: a ``dim N`` header then N*N ``re im`` pairs, row-major."""
    dim = None
    values: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if dim is None:
                if tokens[0] != "dim" or len(tokens) != 2 or tokens[1] not in ("2", "4"):
                    raise InputError(f"{path}:{lineno}: expected 'dim 2' or 'dim 4' header")
                dim = int(tokens[1])
                continue
            try:
                values.extend(float(t) for t in tokens)
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric entry") from None
    if dim is None:
        raise InputError(f"{path}: missing 'dim' header")
    if len(values) != 2 * dim * dim:
        raise InputError(f"{path}: expected {2 * dim * dim} numbers for a {dim}x{dim} matrix, got {len(values)}")
    pairs = np.array(values).reshape(dim * dim, 2)
    return (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)


def _energies(args, base: EnergyConfig = DEFAULT_ENERGIES) -> EnergyConfig:
    updates = {k: getattr(args, k) for k in ("ec", "ej", "el") if getattr(args, k, None) is not None}
    try:
        return replace(base, **updates)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _target(gate: str, phi: float | None):
    try:
        name, inline = parse_gate_spec(gate)
        return library(name, phi if phi is not None else inline or None)
    except (UnknownGateError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        if "known" not in msg:
            msg += f"; known gates: {', '.join(gate_names())}"
        raise InputError(msg) from None


def _write_report(lines: dict, path: Path | None) -> None:
    text = "\n".join(f"{k} {v}" for k, v in lines.items()) + "\n"
    sys.stdout.write(text)
    if path is not None:
        path.write_text(text, encoding="utf-8")


def cmd_compile(args) -> int:
    cfg = _energies(args)
    opt = OptimizerConfig(restarts=args.restarts, max_iters=args.max_iters, t_max=args.t_max,
                          target_f=args.target_f, seed=args.seed, workers=args.workers)
    if args.matrix:
        try:
            target = from_matrix(load_matrix(args.matrix), name="raw")
        except ValueError as exc:
            raise InputError(f"{args.matrix}: {exc}") from None
        res = compile2(target, cfg, opt) if target.dim == 4 else compile1_device(target, cfg, opt)
    else:
        if not args.gate:
            raise InputError("either --gate or --matrix is required")
        target = _target(args.gate, args.phi)
        if target.name in TWO_QUBIT:
            res = compile2(target, cfg, opt)
        elif target.name in ONE_QUBIT:
            res = compile1_device(target, cfg, opt)
        else:
            side, w_name = _embedded_parts(target.name)
            w = library(w_name, target.params or None)
            res = compile1_embedded(w, side, args.k, cfg, opt)

    out = Path(args.out or f"{target.name}.qml")
    cmd = res.to_command(target.label)
    dump(cmd, out)
    report = {
        "gate": target.label,
        "template": res.template.kind,
        "dim": res.template.dim,
        "f_test": f"{res.f_test:.6e}",
        "phase_fidelity": f"{res.phase_fidelity:.12f}",
        "converged": str(res.converged).lower(),
        "restarts": res.restarts_used,
        "seed": res.seed,
        "total_time": f"{res.total_time:.6f}",
        "wall_time": f"{res.wall_time:.3f}",
        "energies": f"{cfg.ec} {cfg.ej} {cfg.el}",
        "output": out,
    }
    if res.k is not None:
        report["k"] = res.k
    if res.message:
        report["message"] = res.message
    _write_report(report, Path(args.report) if args.report else out.with_suffix(out.suffix + ".report"))
    return EXIT_OK if res.converged else EXIT_FAILED


def _load_command(path, args):
    try:
        cmd = load(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except QMLSyntaxError as exc:
        raise InputError(f"{path}: {exc}") from None
    energies = _energies(args, cmd.energies)
    return replace(cmd, energies=energies)


def _format_entry(z: complex) -> str:
    return f"{z.real:+.9e}{z.imag:+.9e}j"


def cmd_run(args) -> int:
    cmd = _load_command(args.path, args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        u = execute(cmd)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for row in u:
        print(" ".join(_format_entry(z) for z in row))
    return EXIT_OK


def cmd_verify(args) -> int:
    cmd = _load_command(args.path, args)
    target = _target(args.gate or cmd.gate_name, args.phi)
    if target.dim != cmd.dim:
        raise InputError(f"gate {target.label} is {target.dim}-dimensional but the command is {cmd.dim}-dimensional")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = execute(cmd)
    d = target.matrix - u
    f = float(np.real(np.vdot(d, d)))
    passed = f <= args.threshold
    _write_report({
        "gate": target.label,
        "command": cmd.gate_name,
        "f_test": f"{f:.1e}",
        "f_test_full": repr(f),
        "phase_fidelity": f"{phase_fidelity(target.matrix, u):.12f}",
        "threshold": f"{args.threshold:.1e}",
        "result": "pass" if passed else "fail",
    }, None)
    return EXIT_OK if passed else EXIT_FAILED


_CLOSURE_SETS = {
    "su2": lambda cfg: liealg.standard_generators(1),
    "su4": lambda cfg: liealg.standard_generators(2),
    "device": liealg.device_generators,
    "su8": lambda cfg: liealg.standard_generators(3),
}


def cmd_closure(args) -> int:
    cfg = _energies(args)
    names = list(_CLOSURE_SETS) if args.set == "all" else [args.set]
    for name in names:
        gens = _CLOSURE_SETS[name](cfg)
        res = liealg.lie_closure_dim(gens, tol=args.tol)
        print(f"closure {name} generators {len(gens)} dimension {res.dimension} "
              f"full {gens.dim ** 2 - 1} rounds {res.rounds}")
    for ident, dev in liealg.reconstruction_identities(cfg).items():
        print(f"reconstruction {'exact' if dev <= 1e-12 else 'failed'} {dev:.1e} {ident}")
    failed = False
    for chk in liealg.verify_constructions():
        failed |= chk.status == "failed"
        print(f"identity {chk.status} {chk.deviation:.1e} {chk.name}")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_tables(args) -> int:
    try:
        checks = corpus.check_corpus(args.corpus)
    except (FileNotFoundError, QMLSyntaxError) as exc:
        raise InputError(str(exc)) from None
    print(corpus.format_report(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED


def _add_energy_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ec", type=float, help="idle bias energy (default 2.5)")
    p.add_argument("--ej", type=float, help="tunneling amplitude (default 0.1)")
    p.add_argument("--el", type=float, help="inductor coupling energy (default 0.1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmlang", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="synthesize a command for a gate")
    p.add_argument("--gate", help="gate name, e.g. cnot, swap, qft4, phshift, had, i-kron-not")
    p.add_argument("--phi", type=float, help="phase for phs / phshift (default pi/2)")
    p.add_argument("--matrix", help="raw target matrix file instead of --gate")
    p.add_argument("--k", type=int, help="total-time multiple for embedded one-qubit gates (default: scan 1..100)")
    p.add_argument("--out", help="output .qml path (default <gate>.qml)")
    p.add_argument("--report", help="report path (default <out>.report)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--t-max", type=float, default=1000.0)
    p.add_argument("--target-f", type=float, default=1e-8)
    p.add_argument("--workers", type=int, default=1)
    _add_energy_flags(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("run", help="execute a .qml command and print its unitary")
    p.add_argument("path")
    _add_energy_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="f_test of a stored command against a gate")
    p.add_argument("path")
    p.add_argument("--gate", help="target gate (default: the file's gate header)")
    p.add_argument("--phi", type=float)
    p.add_argument("--threshold", type=float, default=1e-4)
    _add_energy_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("closure", help="Lie-closure dimensions and commutator identities")
    p.add_argument("--set", choices=["all", *_CLOSURE_SETS], default="all")
    p.add_argument("--tol", type=float, default=1e-9)
    _add_energy_flags(p)
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("tables", help="re-check the golden command tables")
    p.add_argument("--corpus", help="corpus directory (default: bundled tables)")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
