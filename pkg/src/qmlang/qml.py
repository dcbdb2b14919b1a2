"""Letters, commands, the ``.qml`` text format and the interpreter.

A command lists its letters in time order: the first letter acts first, so
it is the rightmost factor of the executed product.

File format (one command per file)::

    gate cnot
    dim 4
    energies 2.5 0.1 0.1
    letter 1 1 0 102.7757
    letter 0 0 1 158.8193

Two-qubit letters are ``letter e1 e2 l t``; one-qubit letters ``letter e t``.
``#`` starts a comment.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .device import DEFAULT_ENERGIES, EnergyConfig, SwitchState, spectral1, spectral2
from .linalg import expm_from_spectral


class QMLSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class EmptyCommandWarning(UserWarning):
    pass


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ValueError(f"letter time must be finite and >= 0, got {t}")
    return t


@dataclass(frozen=True)
class Letter:
    """A two-qubit step: switch triple held for time ``t``."""

    switches: SwitchState
    t: float

    def __post_init__(self):
        object.__setattr__(self, "switches", SwitchState.of(*self.switches))
        object.__setattr__(self, "t", _check_time(self.t))


@dataclass(frozen=True)
class Letter1:
    """A one-qubit step: ``e = 1`` idle point, ``e = 0`` degeneracy point."""

    e: int
    t: float

    def __post_init__(self):
        if self.e not in (0, 1):
            raise ValueError(f"switch must be 0 or 1, got {self.e}")
        object.__setattr__(self, "e", int(self.e))
        object.__setattr__(self, "t", _check_time(self.t))


AnyLetter = Union[Letter, Letter1]


@dataclass(frozen=True)
class Command:
    gate_name: str
    dim: int
    letters: tuple[AnyLetter, ...] = ()
    energies: EnergyConfig = field(default=DEFAULT_ENERGIES)

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        if self.dim not in (2, 4):
            raise ValueError(f"dim must be 2 or 4, got {self.dim}")
        kind = Letter if self.dim == 4 else Letter1
        for lt in self.letters:
            if not isinstance(lt, kind):
                raise TypeError(f"dim {self.dim} command needs {kind.__name__} letters, got {type(lt).__name__}")

    @property
    def times(self) -> np.ndarray:
        return np.array([lt.t for lt in self.letters], dtype=float)

    @property
    def total_time(self) -> float:
        return float(sum(lt.t for lt in self.letters))

    def __add__(self, other: "Command") -> "Command":
        """Concatenation in time: ``self`` runs first, then ``other``."""
        if self.dim != other.dim or self.energies != other.energies:
            raise ValueError("can only concatenate commands with equal dim and energies")
        return Command(self.gate_name, self.dim, self.letters + other.letters, self.energies)


def command_from_times(gate_name: str, sequence: Sequence, times: Sequence[float],
                       energies: EnergyConfig = DEFAULT_ENERGIES) -> Command:
    """Build a command from a switch sequence (states or bits) and matching times."""
    if len(sequence) != len(times):
        raise ValueError(f"{len(sequence)} switch settings but {len(times)} times")
    if sequence and isinstance(sequence[0], (int, np.integer)):
        return Command(gate_name, 2, tuple(Letter1(int(e), t) for e, t in zip(sequence, times)), energies)
    return Command(gate_name, 4, tuple(Letter(SwitchState.of(*s), t) for s, t in zip(sequence, times)), energies)


def letter_propagator(letter: AnyLetter, cfg: EnergyConfig) -> np.ndarray:
    if isinstance(letter, Letter):
        w, v = spectral2(cfg, letter.switches)
    else:
        w, v = spectral1(cfg, letter.e)
    return expm_from_spectral(w, v, letter.t)


def execute(cmd: Command) -> np.ndarray:
    """Unitary realised by a command: ``U = E_n ... E_2 E_1`` with ``E_k = exp(-i t_k H_k)``."""
    u = np.eye(cmd.dim, dtype=complex)
    if not cmd.letters:
        warnings.warn(f"command {cmd.gate_name!r} has no letters; executing as identity",
                      EmptyCommandWarning, stacklevel=2)
        return u
    for letter in cmd.letters:
        u = letter_propagator(letter, cmd.energies) @ u
    return u


# text format

def format_time(t: float, decimals: int | None = None) -> str:
    if decimals is None:
        return np.format_float_positional(t, unique=True, min_digits=4, trim="k")
    return f"{t:.{decimals}f}"


def _format_energy(x: float) -> str:
    return np.format_float_positional(x, unique=True, trim="-")


def serialize(cmd: Command, decimals: int | None = None) -> str:
    """Render a command in the ``.qml`` line format.

    By default times are written as the shortest decimal that reads back to
    the same float, padded to at least 4 decimals. ``decimals=n`` writes a
    fixed number of decimals instead (the bundled tables use 4).
    """
    e = cmd.energies
    lines = [
        f"gate {cmd.gate_name}",
        f"dim {cmd.dim}",
        f"energies {_format_energy(e.ec)} {_format_energy(e.ej)} {_format_energy(e.el)}",
    ]
    for lt in cmd.letters:
        t = format_time(lt.t, decimals)
        if isinstance(lt, Letter):
            s = lt.switches
            lines.append(f"letter {s.e1} {s.e2} {s.l} {t}")
        else:
            lines.append(f"letter {lt.e} {t}")
    return "\n".join(lines) + "\n"


def _parse_bit(tok: str, lineno: int) -> int:
    if tok not in ("0", "1"):
        raise QMLSyntaxError(lineno, f"switch value must be 0 or 1, got {tok!r}")
    return int(tok)


def _parse_float(tok: str, lineno: int, what: str) -> float:
    try:
        value = float(tok)
    except ValueError:
        raise QMLSyntaxError(lineno, f"{what} is not a number: {tok!r}") from None
    if not math.isfinite(value):
        raise QMLSyntaxError(lineno, f"{what} must be finite, got {tok!r}")
    return value


def parse(text: str) -> Command:
    """Parse one command from ``.qml`` text. Errors name the offending line."""
    gate = None
    dim = None
    energies = DEFAULT_ENERGIES
    raw_letters: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "gate":
            if len(rest) != 1:
                raise QMLSyntaxError(lineno, "expected 'gate <name>'")
            gate = rest[0]
        elif key == "dim":
            if len(rest) != 1 or rest[0] not in ("2", "4"):
                raise QMLSyntaxError(lineno, "expected 'dim 2' or 'dim 4'")
            if raw_letters:
                raise QMLSyntaxError(lineno, "'dim' must precede the letters")
            dim = int(rest[0])
        elif key == "energies":
            if len(rest) != 3:
                raise QMLSyntaxError(lineno, "expected 'energies <E_c> <E_J> <E_L>'")
            vals = [_parse_float(tok, lineno, "energy") for tok in rest]
            try:
                energies = EnergyConfig(*vals)
            except ValueError as exc:
                raise QMLSyntaxError(lineno, str(exc)) from None
        elif key == "letter":
            raw_letters.append((lineno, rest))
        else:
            raise QMLSyntaxError(lineno, f"unknown header key {key!r}")

    if gate is None:
        raise QMLSyntaxError(1, "missing 'gate' header")
    if dim is None:
        raise QMLSyntaxError(1, "missing 'dim' header")

    letters: list[AnyLetter] = []
    width = 4 if dim == 4 else 2
    for lineno, fields in raw_letters:
        if len(fields) != width:
            raise QMLSyntaxError(lineno, f"letter for dim {dim} needs {width} fields, got {len(fields)}")
        bits = [_parse_bit(tok, lineno) for tok in fields[:-1]]
        t = _parse_float(fields[-1], lineno, "time")
        if t < 0:
            raise QMLSyntaxError(lineno, f"time must be >= 0, got {fields[-1]}")
        letters.append(Letter(SwitchState(*bits), t) if dim == 4 else Letter1(bits[0], t))
    return Command(gate, dim, tuple(letters), energies)


def load(path) -> Command:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(cmd: Command, path, decimals: int | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(cmd, decimals))
