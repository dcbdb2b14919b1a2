"""Controllability checks: Lie closure of Hamiltonian generator sets.

The algebra is kept as a real vector space of Hermitian traceless matrices
with bracket ``(A, B) -> i[A, B]``. Closure is computed breadth first: each
round brackets the current basis against the directions added in the
previous round, and keeps any bracket with a residual (after projection
onto the span) above ``tol``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .device import CANONICAL_STATES, DEFAULT_ENERGIES, EnergyConfig, hamiltonian2
from .linalg import commutator, embed, hermiticity_defect, pauli

GEN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    dim: int
    elements: tuple[np.ndarray, ...] = field(default=())
    names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        els = tuple(np.asarray(e, dtype=complex) for e in self.elements)
        object.__setattr__(self, "elements", els)
        if not self.names:
            object.__setattr__(self, "names", tuple(f"g{k}" for k in range(len(els))))
        for name, e in zip(self.names, els):
            if e.shape != (self.dim, self.dim):
                raise ValueError(f"generator {name} has shape {e.shape}, expected {(self.dim, self.dim)}")
            if hermiticity_defect(e) > GEN_TOL:
                raise ValueError(f"generator {name} is not Hermitian (defect {hermiticity_defect(e):.2e})")
            if abs(np.trace(e)) > GEN_TOL * max(1.0, np.linalg.norm(e)):
                raise ValueError(f"generator {name} is not traceless (trace {np.trace(e):.2e})")

    def __len__(self):
        return len(self.elements)


class LieClosure(NamedTuple):
    dimension: int
    basis: list[np.ndarray]
    rounds: int


def _hs_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def _residual(x: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # two passes of modified Gram-Schmidt; coefficients are real for Hermitian pairs
    for _ in range(2):
        for b in basis:
            x = x - np.real(np.vdot(b, x)) * b
    return x


def _try_add(x: np.ndarray, basis: list[np.ndarray], tol: float) -> np.ndarray | None:
    n = _hs_norm(x)
    if n == 0.0:
        return None
    r = _residual(x / n, basis)
    rn = _hs_norm(r)
    if rn <= tol:
        return None
    r = r / rn
    r = 0.5 * (r + r.conj().T)
    r = r / _hs_norm(r)
    basis.append(r)
    return r


def lie_closure_dim(gens: GeneratorSet | Sequence[np.ndarray], tol: float = 1e-9,
                    max_rounds: int = 64) -> LieClosure:
    """Dimension and orthonormal basis of the real Lie algebra generated by ``gens``.

    Returns a ``LieClosure(dimension, basis, rounds)``; ``rounds`` counts
    the bracket rounds that added at least one new direction.
    """
    if not isinstance(gens, GeneratorSet):
        gens = list(gens)
        gens = GeneratorSet(gens[0].shape[0], tuple(gens))
    if not 0 < tol < 1e-3:
        raise ValueError(f"tol must lie in (0, 1e-3), got {tol}")

    basis: list[np.ndarray] = []
    frontier = [b for g in gens.elements if (b := _try_add(g, basis, tol)) is not None]
    rounds = 0
    limit = gens.dim**2 - 1
    while frontier and len(basis) < limit and rounds < max_rounds:
        old = list(basis)
        new = []
        for a in old:
            for b in frontier:
                if a is b:
                    continue
                c = _try_add(1j * commutator(a, b), basis, tol)
                if c is not None:
                    new.append(c)
        if not new:
            break
        rounds += 1
        frontier = new
    return LieClosure(len(basis), basis, rounds)


# generator sets

def _site_paulis(n: int, y_sign: int = 1) -> dict[str, list[np.ndarray]]:
    p = {a: pauli(a) for a in "xyz"}
    p["y"] = y_sign * p["y"]
    return {a: [embed(p[a], k, n) for k in range(n)] for a in "xyz"}


def standard_generators(n: int) -> GeneratorSet:
    """``sigma_z`` on every site, the collective ``sum_k sigma_x``, and ``sum_{i<j} sigma_y sigma_y``.

    For ``n = 1`` the coupling term is empty and the set is ``{sigma_z, sigma_x}``.
    """
    if n not in (1, 2, 3):
        raise ValueError(f"standard generators are provided for 1 to 3 qubits, got {n}")
    s = _site_paulis(n)
    els = list(s["z"]) + [sum(s["x"])]
    names = [f"z{k + 1}" for k in range(n)] + ["sum_x"]
    if n > 1:
        els.append(sum(s["y"][i] @ s["y"][j] for i, j in combinations(range(n), 2)))
        names.append("sum_yy")
    return GeneratorSet(2**n, tuple(els), tuple(names))


def device_generators(cfg: EnergyConfig = DEFAULT_ENERGIES) -> GeneratorSet:
    """The four switch Hamiltonians H1..H4 of the coupled two-junction device."""
    return GeneratorSet(4, tuple(hamiltonian2(cfg, s) for s in CANONICAL_STATES), ("H1", "H2", "H3", "H4"))


def reconstruction_identities(cfg: EnergyConfig = DEFAULT_ENERGIES) -> dict[str, float]:
    """Max deviation of the single-site and coupling operators rebuilt from H1..H4."""
    h1, h2, h3, h4 = device_generators(cfg).elements
    s = _site_paulis(2)
    checks = {
        "z1 = 2(H1 - H3)/E_c": (s["z"][0], 2 * (h1 - h3) / cfg.ec),
        "z2 = 2(H1 - H4)/E_c": (s["z"][1], 2 * (h1 - h4) / cfg.ec),
        "x1 + x2 = 2(H1 - H3 - H4)/E_J": (s["x"][0] + s["x"][1], 2 * (h1 - h3 - h4) / cfg.ej),
        "y1 y2 = 2(H3 + H4 - H1 - H2)/E_L": (s["y"][0] @ s["y"][1], 2 * (h3 + h4 - h1 - h2) / cfg.el),
    }
    return {name: float(np.max(np.abs(lhs - rhs))) for name, (lhs, rhs) in checks.items()}


# nested-commutator constructions of Pauli strings

def _c(a, b):
    return commutator(a, b)


def _constructions() -> list[tuple[str, int, Callable[[dict], tuple[np.ndarray, np.ndarray]]]]:
    """(name, qubits, f) with ``f(paulis) -> (lhs, rhs)``."""
    out = []
    for k in (0, 1):
        out.append((f"y{k + 1} = (i/2)[x1 + x2, z{k + 1}]", 2,
                    lambda s, k=k: (s["y"][k], 0.5j * _c(s["x"][0] + s["x"][1], s["z"][k]))))
        out.append((f"x{k + 1} = (i/2)[z{k + 1}, y{k + 1}]", 2,
                    lambda s, k=k: (s["x"][k], 0.5j * _c(s["z"][k], s["y"][k]))))
        out.append((f"x{k + 1} = (1/4)[z{k + 1}, [z{k + 1}, x1 + x2]]", 2,
                    lambda s, k=k: (s["x"][k], 0.25 * _c(s["z"][k], _c(s["z"][k], s["x"][0] + s["x"][1])))))
    out.append(("x1 z2 = (1/4)[x2, [z1, y1 y2]]", 2,
                lambda s: (s["x"][0] @ s["z"][1], 0.25 * _c(s["x"][1], _c(s["z"][0], s["y"][0] @ s["y"][1])))))
    out.append(("x1 z2 = (1/16)[[z2, [z2, x1 + x2]], [z1, y1 y2]]", 2,
                lambda s: (s["x"][0] @ s["z"][1],
                           _c(_c(s["z"][1], _c(s["z"][1], s["x"][0] + s["x"][1])),
                              _c(s["z"][0], s["y"][0] @ s["y"][1])) / 16)))

    def yy3(s):
        return s["y"][0] @ s["y"][1] + s["y"][0] @ s["y"][2] + s["y"][1] @ s["y"][2]

    out.append(("y1 x2 + x2 y3 = (i/2)[z2, sum_yy]", 3,
                lambda s: (s["y"][0] @ s["x"][1] + s["x"][1] @ s["y"][2], 0.5j * _c(s["z"][1], yy3(s)))))
    out.append(("x1 x2 = (i/2)[z1, y1 x2 + x2 y3]", 3,
                lambda s: (s["x"][0] @ s["x"][1],
                           0.5j * _c(s["z"][0], s["y"][0] @ s["x"][1] + s["x"][1] @ s["y"][2]))))
    out.append(("y2 = (i/2)[z2, x1 + x2 + x3]", 3,
                lambda s: (s["y"][1], 0.5j * _c(s["z"][1], s["x"][0] + s["x"][1] + s["x"][2]))))
    out.append(("x1 z2 = (i/2)[y2, x1 x2]", 3,
                lambda s: (s["x"][0] @ s["z"][1], 0.5j * _c(s["y"][1], s["x"][0] @ s["x"][1]))))
    out.append(("z1 y2 x3 = (i/2)[z1 z2, x2 x3]", 3,
                lambda s: (s["z"][0] @ s["y"][1] @ s["x"][2],
                           0.5j * _c(s["z"][0] @ s["z"][1], s["x"][1] @ s["x"][2]))))
    return out


class IdentityCheck(NamedTuple):
    name: str
    deviation: float
    flipped_deviation: float
    status: str  # "exact", "sigma_y-convention" or "failed"


def verify_constructions(tol: float = 1e-12) -> list[IdentityCheck]:
    """Evaluate the nested-commutator constructions of Pauli strings.

    Each identity is checked with ``sigma_y = [[0, -i], [i, 0]]``. One that
    fails there but holds exactly with the opposite sign of ``sigma_y`` is
    reported as ``"sigma_y-convention"``, not as a pass.
    """
    report = []
    for name, n, build in _constructions():
        lhs, rhs = build(_site_paulis(n, 1))
        dev = float(np.max(np.abs(lhs - rhs)))
        lhs_f, rhs_f = build(_site_paulis(n, -1))
        dev_f = float(np.max(np.abs(lhs_f - rhs_f)))
        if dev <= tol:
            status = "exact"
        elif dev_f <= tol:
            status = "sigma_y-convention"
        else:
            status = "failed"
        report.append(IdentityCheck(name, dev, dev_f, status))
    return report
