"""Target gates, SU projection and phase-aware comparison."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .linalg import is_unitary, pauli, tensor

SX, SY, SZ, ID2 = pauli("x"), pauli("y"), pauli("z"), pauli("i")
ID4 = np.eye(4, dtype=complex)

DEFAULT_PHI = math.pi / 2

ONE_QUBIT = ("not", "sqrt-not", "had", "phs")
TWO_QUBIT = ("cnot", "swap", "qft4", "phshift")
PARAMETRIC = ("phs", "phshift")

_ALIASES = {
    "sqrtnot": "sqrt-not",
    "sqrt_not": "sqrt-not",
    "hadamard": "had",
    "h": "had",
    "qft": "qft4",
    "phaseshift": "phshift",
}


class UnknownGateError(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown gate"


@dataclass(frozen=True, eq=False)
class GateTarget:
    name: str
    dim: int
    matrix: np.ndarray
    params: tuple[float, ...] = field(default=())

    @property
    def label(self) -> str:
        """Canonical text form, e.g. ``phshift(1.5707963267948966)``."""
        if not self.params:
            return self.name
        return f"{self.name}({','.join(repr(float(p)) for p in self.params)})"


def su_project(u: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Rescale a unitary into the special unitary group.

    Returns ``c * U`` with ``c = exp(-i arg(det U) / dim)`` and
    ``arg(det U)`` taken in ``[-pi, pi)``. With that branch NOT maps to
    ``i sigma_x`` and CNOT to ``exp(i pi/4) CNOT``. Other branches differ by a
    dim-th root of unity.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    if not is_unitary(u, tol):
        defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        raise ValueError(f"matrix is not unitary: max|U^dagger U - I| = {defect:.3e}")
    dim = u.shape[0]
    theta = float(np.angle(np.linalg.det(u)))
    if theta >= math.pi - 1e-12:
        theta -= 2 * math.pi
    return np.exp(-1j * theta / dim) * u


def phase_fidelity(g: np.ndarray, u: np.ndarray) -> float:
    """``|trace(G^dagger U)| / dim``; equals 1 iff ``U`` is ``G`` up to global phase."""
    g = np.asarray(g)
    u = np.asarray(u)
    if g.shape != u.shape:
        raise ValueError(f"dimension mismatch: {g.shape} vs {u.shape}")
    return float(abs(np.vdot(g, u)) / g.shape[0])


# standard (unprojected) matrices

def standard_matrix(name: str, phi: float | None = None) -> np.ndarray:
    """The textbook U(2^N) matrix of a library gate, before SU projection."""
    name = canonical_name(name)
    phi = DEFAULT_PHI if phi is None else phi
    if name == "not":
        return SX.copy()
    if name == "sqrt-not":
        a, b = np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)
        return np.array([[a, b], [b, a]]) / math.sqrt(2)
    if name == "had":
        return (SX + SZ) / math.sqrt(2)
    if name == "phs":
        return np.diag([1, np.exp(1j * phi)])
    if name == "cnot":
        return np.eye(4, dtype=complex)[[0, 1, 3, 2]]
    if name == "swap":
        return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    if name == "qft4":
        w = np.exp(2j * math.pi / 4)
        return np.array([[w ** (j * k) for k in range(4)] for j in range(4)]) / 2
    if name == "phshift":
        return np.diag([1, 1, 1, np.exp(1j * phi)])
    side = _embedded_parts(name)
    if side is not None:
        where, w_name = side
        w = standard_matrix(w_name, phi)
        return tensor(ID2, w) if where == "second" else tensor(w, ID2)
    raise UnknownGateError(f"unknown gate {name!r}")


# SU-projected forms; the phase choice matters because f_test is phase sensitive

def _one_qubit_su(name: str, phi: float) -> np.ndarray:
    if name == "not":
        return 1j * SX
    if name == "sqrt-not":
        return (ID2 + 1j * SX) / math.sqrt(2)
    if name == "had":
        return 1j * (SX + SZ) / math.sqrt(2)
    if name == "phs":
        return math.cos(phi / 2) * ID2 - 1j * math.sin(phi / 2) * SZ
    raise UnknownGateError(f"unknown one-qubit gate {name!r}")


def _two_qubit_su(name: str, phi: float) -> np.ndarray:
    zi, iz = tensor(SZ, ID2), tensor(ID2, SZ)
    if name == "cnot":
        ix, zx = tensor(ID2, SX), tensor(SZ, SX)
        return np.exp(1j * math.pi / 4) / 2 * (-zx + zi + ix + ID4)
    if name == "swap":
        xx, yy, zz = tensor(SX, SX), tensor(SY, SY), tensor(SZ, SZ)
        return np.exp(1j * math.pi / 4) / 2 * (xx + yy + zz + ID4)
    if name == "qft4":
        return su_project(standard_matrix("qft4"))
    if name == "phshift":
        # exp(-i phi/4) diag(1, 1, 1, e^{i phi})
        zz = tensor(SZ, SZ)
        return (
            (3 * np.exp(-1j * phi / 4) + np.exp(3j * phi / 4)) / 4 * ID4
            + 1j * np.exp(1j * phi / 4) * math.sin(phi / 2) / 2 * (zz - zi - iz)
        )
    raise UnknownGateError(f"unknown two-qubit gate {name!r}")


_EMBED_RE = re.compile(r"^(?:i-kron-(?P<second>[a-z-]+)|(?P<first>[a-z-]+)-kron-i)$")


def _embedded_parts(name: str) -> tuple[str, str] | None:
    m = _EMBED_RE.match(name)
    if not m:
        return None
    where = "second" if m.group("second") else "first"
    w_name = canonical_name(m.group(where))
    if w_name not in ONE_QUBIT:
        return None
    return where, w_name


def canonical_name(name: str) -> str:
    key = name.strip().lower().replace(" ", "")
    m = _EMBED_RE.match(key)
    if m:
        where = "second" if m.group("second") else "first"
        inner = _ALIASES.get(m.group(where), m.group(where))
        return f"i-kron-{inner}" if where == "second" else f"{inner}-kron-i"
    return _ALIASES.get(key, key)


def parse_gate_spec(spec: str) -> tuple[str, tuple[float, ...]]:
    """Split ``"phshift(1.57)"`` into ``("phshift", (1.57,))``."""
    m = re.fullmatch(r"\s*([A-Za-z0-9_\-]+)\s*(?:\(([^)]*)\))?\s*", spec)
    if not m:
        raise UnknownGateError(f"cannot parse gate spec {spec!r}")
    params = ()
    if m.group(2) is not None and m.group(2).strip():
        try:
            params = tuple(float(p) for p in m.group(2).split(","))
        except ValueError:
            raise UnknownGateError(f"bad gate parameters in {spec!r}") from None
    return canonical_name(m.group(1)), params


def gate_names() -> list[str]:
    embedded = [f"i-kron-{w}" for w in ONE_QUBIT] + [f"{w}-kron-i" for w in ONE_QUBIT]
    return list(ONE_QUBIT) + list(TWO_QUBIT) + embedded


def library(name: str, params=None) -> GateTarget:
    """Look up a named gate with its SU-projected matrix.

    ``params`` carries the phase for ``phs``/``phshift`` (and the embedded
    ``phs`` forms); it may be a number or a sequence of one number. When the
    name carries its own parameter, e.g. ``"phshift(0.3)"``, that is used.
    Omitting the phase selects pi/2.
    """
    base, inline = parse_gate_spec(name)
    if params is None:
        params = inline
    elif np.isscalar(params):
        params = (float(params),)
    else:
        params = tuple(float(p) for p in params)

    embedded = _embedded_parts(base)
    core = embedded[1] if embedded else base
    if core in PARAMETRIC:
        if len(params) > 1:
            raise ValueError(f"gate {base!r} takes one phase parameter, got {params}")
        phi = params[0] if params else DEFAULT_PHI
        params = (phi,)
    elif params:
        raise ValueError(f"gate {base!r} takes no parameters, got {params}")
    else:
        phi = DEFAULT_PHI

    if base in ONE_QUBIT:
        return GateTarget(base, 2, _one_qubit_su(base, phi), params)
    if base in TWO_QUBIT:
        return GateTarget(base, 4, _two_qubit_su(base, phi), params)
    if embedded:
        where, w_name = embedded
        w = _one_qubit_su(w_name, phi)
        m = tensor(ID2, w) if where == "second" else tensor(w, ID2)
        return GateTarget(base, 4, m, params)
    raise UnknownGateError(f"unknown gate {name!r}; known: {', '.join(gate_names())}")


def from_matrix(matrix: np.ndarray, name: str = "raw", tol: float = 1e-8) -> GateTarget:
    """Wrap a user-supplied unitary as a target, projecting it into SU(dim)."""
    m = np.asarray(matrix, dtype=complex)
    if m.shape not in ((2, 2), (4, 4)):
        raise ValueError(f"target matrix must be 2x2 or 4x4, got {m.shape}")
    return GateTarget(name, m.shape[0], su_project(m, tol=tol))
