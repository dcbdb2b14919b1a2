"""Switch-selected Hamiltonians of the one- and two-junction charge-qubit devices.

Units: hbar = k_B = 1. Energies are plain numbers equal to their value in
Kelvin, times are dimensionless (one unit is hbar / (k_B * 1 K) ~ 7.64e-12 s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .linalg import embed, pauli, spectral, tensor

SX, SY, SZ, ID2 = pauli("x"), pauli("y"), pauli("z"), pauli("i")


@dataclass(frozen=True)
class EnergyConfig:
    """Device energies: idle bias ``ec``, tunneling ``ej``, inductive coupling ``el``."""

    ec: float = 2.5
    ej: float = 0.1
    el: float = 0.1

    def __post_init__(self):
        for name in ("ec", "ej", "el"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.ec <= 0:
            raise ValueError(f"ec must be positive, got {self.ec}")
        if self.ej <= 0:
            raise ValueError(f"ej must be positive, got {self.ej}")
        if self.el < 0:
            raise ValueError(f"el must be non-negative, got {self.el}")


DEFAULT_ENERGIES = EnergyConfig()


class SwitchState(NamedTuple):
    """Binary switches: bias on junction 1, bias on junction 2, inductor."""

    e1: int
    e2: int
    l: int  # noqa: E741

    @classmethod
    def of(cls, e1, e2, l) -> "SwitchState":  # noqa: E741
        bits = tuple(int(b) for b in (e1, e2, l))
        if any(b not in (0, 1) for b in bits) or any(float(x) != b for x, b in zip((e1, e2, l), bits)):
            raise ValueError(f"switch values must be 0 or 1, got {(e1, e2, l)}")
        return cls(*bits)


H1_STATE = SwitchState(1, 1, 0)
H2_STATE = SwitchState(0, 0, 1)
H3_STATE = SwitchState(0, 1, 0)
H4_STATE = SwitchState(1, 0, 0)
CANONICAL_STATES = (H1_STATE, H2_STATE, H3_STATE, H4_STATE)
ALL_STATES = tuple(SwitchState(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1))


@dataclass(frozen=True)
class QubitBasisInfo:
    eta: float
    delta_e: float
    plus_state: np.ndarray
    minus_state: np.ndarray


def hamiltonian1(cfg: EnergyConfig, on: int) -> np.ndarray:
    """Single-junction Hamiltonian: idle point when ``on`` is 1, degeneracy point when 0."""
    if on not in (0, 1):
        raise ValueError(f"switch must be 0 or 1, got {on}")
    return on * (cfg.ec / 2) * SZ - (cfg.ej / 2) * SX


def hamiltonian2(cfg: EnergyConfig, s: SwitchState) -> np.ndarray:
    """Two-junction Hamiltonian for switch state ``s``.

    Junction biases are ``e1*ec`` and ``e2*ec``, the tunneling amplitude
    ``ej`` is shared and fixed, and the inductor adds
    ``-(el/2) sigma_y (x) sigma_y`` when ``l`` is 1.
    """
    e1, e2, l = SwitchState.of(*s)  # noqa: E741
    return (
        e1 * (cfg.ec / 2) * embed(SZ, 0, 2)
        + e2 * (cfg.ec / 2) * embed(SZ, 1, 2)
        - (cfg.ej / 2) * (embed(SX, 0, 2) + embed(SX, 1, 2))
        - l * (cfg.el / 2) * tensor(SY, SY)
    )


@lru_cache(maxsize=256)
def spectral2(cfg: EnergyConfig, s: SwitchState) -> tuple[np.ndarray, np.ndarray]:
    """Cached eigen-decomposition of ``hamiltonian2(cfg, s)``; treat as read-only."""
    return spectral(hamiltonian2(cfg, SwitchState.of(*s)))


@lru_cache(maxsize=64)
def spectral1(cfg: EnergyConfig, on: int) -> tuple[np.ndarray, np.ndarray]:
    return spectral(hamiltonian1(cfg, on))


def _energies(cfg, ej):
    if isinstance(cfg, EnergyConfig):
        return cfg.ec, cfg.ej
    return float(cfg), float(ej)


def mixing_angle(cfg: EnergyConfig | float, ej: float | None = None) -> float:
    """``arctan(ej / ec)``; pass a config or raw ``(ec, ej)`` (``ec = 0`` gives pi/2)."""
    ec, ej = _energies(cfg, ej)
    if ec < 0 or ej <= 0:
        raise ValueError(f"mixing angle needs ec >= 0 and ej > 0, got ({ec}, {ej})")
    return math.atan2(ej, ec)


def splitting(cfg: EnergyConfig | float, ej: float | None = None) -> float:
    """Level splitting ``sqrt(ej**2 + ec**2)``."""
    ec, ej = _energies(cfg, ej)
    return math.hypot(ej, ec)


def idle_basis(cfg: EnergyConfig) -> QubitBasisInfo:
    """Energy eigenbasis of the idle Hamiltonian.

    ``plus_state`` has energy ``+delta_e/2`` and ``minus_state`` ``-delta_e/2``.
    In the (up, down) basis they read ``-cos(eta/2)|up> + sin(eta/2)|down>``
    and ``sin(eta/2)|up> + cos(eta/2)|down>``.
    """
    eta = mixing_angle(cfg)
    de = splitting(cfg)
    c, s = math.cos(eta / 2), math.sin(eta / 2)
    plus = np.array([-c, s], dtype=complex)
    minus = np.array([s, c], dtype=complex)
    h = hamiltonian1(cfg, 1)
    for vec, sign in ((plus, 1), (minus, -1)):
        residual = np.max(np.abs(h @ vec - sign * (de / 2) * vec))
        if residual > 1e-10:
            raise ArithmeticError(f"idle eigenvector check failed, residual {residual:.2e}")
    return QubitBasisInfo(eta=eta, delta_e=de, plus_state=plus, minus_state=minus)
