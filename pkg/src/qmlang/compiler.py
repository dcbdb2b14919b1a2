"""Gate-to-command synthesis.

The objective for a target ``G`` and a switch template is the squared
Frobenius distance ``f = sum_ij |G_ij - U(t)_ij|^2`` with
``U(t) = exp(-i t_n H_n) ... exp(-i t_1 H_1)``. It is compared against the
fixed SU phase of the target, so it is not invariant under global phase;
``phase_fidelity`` is reported alongside.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .device import (
    CANONICAL_STATES,
    DEFAULT_ENERGIES,
    H1_STATE,
    H3_STATE,
    H4_STATE,
    EnergyConfig,
    hamiltonian1,
    hamiltonian2,
    spectral1,
    spectral2,
    splitting,
)
from .gates import GateTarget, library, phase_fidelity
from .linalg import expm_from_spectral, max_abs, tensor
from .qml import Command, command_from_times

log = logging.getLogger(__name__)

TWO_QUBIT_15 = "two_qubit_15"
ONE_QUBIT_DEVICE_3 = "one_qubit_device_3"
EMBEDDED_SECOND_4 = "embedded_second_4"
EMBEDDED_FIRST_4 = "embedded_first_4"


@dataclass(frozen=True)
class Template:
    """Switch sequence of a command shape, optionally with a fixed total time."""

    kind: str
    sequence: tuple
    total_time: float | None = None

    @property
    def dim(self) -> int:
        return 2 if self.kind == ONE_QUBIT_DEVICE_3 else 4

    def __len__(self) -> int:
        return len(self.sequence)

    def spectra(self, cfg: EnergyConfig) -> list[tuple[np.ndarray, np.ndarray]]:
        if self.dim == 2:
            return [spectral1(cfg, e) for e in self.sequence]
        return [spectral2(cfg, s) for s in self.sequence]

    def hamiltonians(self, cfg: EnergyConfig) -> list[np.ndarray]:
        if self.dim == 2:
            return [hamiltonian1(cfg, e) for e in self.sequence]
        return [hamiltonian2(cfg, s) for s in self.sequence]

    def command(self, gate_name: str, times: Sequence[float], cfg: EnergyConfig = DEFAULT_ENERGIES) -> Command:
        return command_from_times(gate_name, self.sequence, list(times), cfg)


def two_qubit_template() -> Template:
    """H1 H2 H3 H4 repeated and cut at 15 letters (ends on H3)."""
    return Template(TWO_QUBIT_15, tuple(CANONICAL_STATES[i % 4] for i in range(15)))


def one_qubit_device_template() -> Template:
    """Degenerate, idle, degenerate on the single-junction device."""
    return Template(ONE_QUBIT_DEVICE_3, (0, 1, 0))


def embedded_total_time(k: int, cfg: EnergyConfig) -> float:
    """``4 k pi / dE``: the spectator qubit then returns to the identity."""
    return 4 * k * math.pi / splitting(cfg)


def embedded_template(side: str, k: int | None = None, cfg: EnergyConfig = DEFAULT_ENERGIES) -> Template:
    """Four-step template acting as ``I (x) W`` (side="second") or ``W (x) I`` (side="first")."""
    if side == "second":
        kind, pulse = EMBEDDED_SECOND_4, H4_STATE
    elif side == "first":
        kind, pulse = EMBEDDED_FIRST_4, H3_STATE
    else:
        raise ValueError(f"side must be 'first' or 'second', got {side!r}")
    total = None if k is None else embedded_total_time(k, cfg)
    return Template(kind, (pulse, H1_STATE, pulse, H1_STATE), total)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 200
    max_iters: int = 500
    t_min: float = 0.0
    t_max: float = 1000.0
    target_f: float = 1e-8
    seed: int = 0
    batch: int = 8
    workers: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 <= self.t_min < self.t_max:
            raise ValueError(f"need 0 <= t_min < t_max, got {self.t_min}, {self.t_max}")
        if self.target_f <= 0:
            raise ValueError("target_f must be positive")
        if self.batch < 1 or self.workers < 1:
            raise ValueError("batch and workers must be >= 1")


@dataclass
class CompileResult:
    times: np.ndarray
    f_test: float
    restarts_used: int
    converged: bool
    seed: int
    template: Template
    phase_fidelity: float = float("nan")
    k: int | None = None
    message: str = ""
    wall_time: float = 0.0
    target_name: str = ""
    energies: EnergyConfig = field(default=DEFAULT_ENERGIES)

    @property
    def total_time(self) -> float:
        return float(np.sum(self.times))

    def to_command(self, gate_name: str | None = None) -> Command:
        return self.template.command(gate_name or self.target_name or "unnamed", self.times, self.energies)


# objective

def _target_matrix(g) -> np.ndarray:
    return g.matrix if isinstance(g, GateTarget) else np.asarray(g, dtype=complex)


def _check_times(times, tpl: Template) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.shape != (len(tpl),):
        raise ValueError(f"template {tpl.kind} needs {len(tpl)} times, got shape {t.shape}")
    return t


def evolve(times, tpl: Template, cfg: EnergyConfig = DEFAULT_ENERGIES) -> np.ndarray:
    t = _check_times(times, tpl)
    u = np.eye(tpl.dim, dtype=complex)
    for tk, (w, v) in zip(t, tpl.spectra(cfg)):
        u = expm_from_spectral(w, v, tk) @ u
    return u


def _value_and_grad(g: np.ndarray, t: np.ndarray, spectra, hams) -> tuple[float, np.ndarray]:
    n = len(t)
    steps = [expm_from_spectral(w, v, tk) for tk, (w, v) in zip(t, spectra)]
    # right[k] = E_{k-1} ... E_0, i.e. everything applied before step k
    right = [np.eye(g.shape[0], dtype=complex)]
    for e in steps:
        right.append(e @ right[-1])
    u = right[-1]
    diff = g - u
    f = float(np.real(np.vdot(diff, diff)))
    grad = np.empty(n)
    left = np.eye(g.shape[0], dtype=complex)
    for k in range(n - 1, -1, -1):
        du = left @ (-1j * hams[k]) @ steps[k] @ right[k]
        grad[k] = -2.0 * np.real(np.vdot(diff, du))
        left = left @ steps[k]
    return f, grad


def f_test(g, times, tpl: Template, cfg: EnergyConfig = DEFAULT_ENERGIES) -> float:
    """Squared Frobenius distance between the target and the evolution at ``times``."""
    gm = _target_matrix(g)
    u = evolve(times, tpl, cfg)
    if gm.shape != u.shape:
        raise ValueError(f"target is {gm.shape}, template evolves {u.shape}")
    d = gm - u
    return float(np.real(np.vdot(d, d)))


def grad_f(g, times, tpl: Template, cfg: EnergyConfig = DEFAULT_ENERGIES) -> np.ndarray:
    """Analytic gradient of ``f_test`` with respect to the step times.

    ``dU/dt_k = L_k (-i H_k) exp(-i t_k H_k) R_k`` where ``L_k``/``R_k`` are
    the products of the later/earlier steps, and
    ``df/dt_k = -2 Re trace((G - U)^dagger dU/dt_k)``.
    """
    t = _check_times(times, tpl)
    gm = _target_matrix(g)
    return _value_and_grad(gm, t, tpl.spectra(cfg), tpl.hamiltonians(cfg))[1]


# multi-start driver

@dataclass
class _Run:
    index: int
    times: np.ndarray
    f: float


def _better(a: _Run, b: _Run | None) -> bool:
    if b is None:
        return True
    if a.f != b.f:
        return a.f < b.f
    return float(np.sum(a.times)) < float(np.sum(b.times))


def _multistart(run_one, opt: OptimizerConfig) -> tuple[_Run, int, bool]:
    """Run restarts in fixed batches until one reaches ``target_f``.

    Restart ``i`` draws from ``default_rng((seed, i))`` and batches are formed
    independently of ``workers``, so threaded and serial runs agree. Among the
    converged restarts of the first successful batch the shortest total time
    wins.
    """
    best: _Run | None = None
    used = 0
    pool = ThreadPoolExecutor(opt.workers) if opt.workers > 1 else None
    try:
        for start in range(0, opt.restarts, opt.batch):
            idx = range(start, min(start + opt.batch, opt.restarts))
            runs = list(pool.map(run_one, idx)) if pool else [run_one(i) for i in idx]
            used += len(runs)
            hits = [r for r in runs if r.f <= opt.target_f]
            if hits:
                win = min(hits, key=lambda r: (float(np.sum(r.times)), r.index))
                return win, used, True
            for r in runs:
                if _better(r, best):
                    best = r
    finally:
        if pool:
            pool.shutdown()
    return best, used, False


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng((seed, index))


def _compile_box(g: np.ndarray, tpl: Template, cfg: EnergyConfig, opt: OptimizerConfig):
    spectra, hams = tpl.spectra(cfg), tpl.hamiltonians(cfg)
    bounds = [(opt.t_min, opt.t_max)] * len(tpl)

    def fg(x):
        return _value_and_grad(g, x, spectra, hams)

    def run_one(i: int) -> _Run:
        x0 = _rng(opt.seed, i).uniform(opt.t_min, opt.t_max, len(tpl))
        res = minimize(fg, x0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": opt.max_iters, "ftol": 1e-16, "gtol": 1e-12})
        x = np.clip(res.x, opt.t_min, opt.t_max)
        return _Run(i, x, fg(x)[0])

    return _multistart(run_one, opt)


def _finish(g: GateTarget, tpl, cfg, opt, run: _Run, used: int, converged: bool, t0: float, **extra) -> CompileResult:
    u = evolve(run.times, tpl, cfg)
    return CompileResult(
        times=np.asarray(run.times, dtype=float),
        f_test=f_test(g, run.times, tpl, cfg),
        restarts_used=used,
        converged=converged,
        seed=opt.seed,
        template=tpl,
        phase_fidelity=phase_fidelity(g.matrix, u),
        wall_time=time.perf_counter() - t0,
        target_name=g.label,
        energies=cfg,
        **extra,
    )


def _as_target(g, dim: int) -> GateTarget:
    if isinstance(g, str):
        g = library(g)
    elif not isinstance(g, GateTarget):
        g = GateTarget("raw", dim, np.asarray(g, dtype=complex))
    if g.dim != dim or g.matrix.shape != (dim, dim):
        raise ValueError(f"expected a {dim}x{dim} target, got {g.matrix.shape}")
    det_defect = abs(np.linalg.det(g.matrix) - 1)
    if det_defect > 1e-8 or max_abs(g.matrix.conj().T @ g.matrix - np.eye(dim)) > 1e-8:
        raise ValueError(f"target {g.name!r} is not in SU({dim}) (|det - 1| = {det_defect:.2e}); su_project it first")
    return g


def compile2(g, cfg: EnergyConfig = DEFAULT_ENERGIES, opt: OptimizerConfig = OptimizerConfig()) -> CompileResult:
    """Fit the 15-letter two-qubit template to an SU(4) target."""
    t0 = time.perf_counter()
    g = _as_target(g, 4)
    tpl = two_qubit_template()
    run, used, ok = _compile_box(g.matrix, tpl, cfg, opt)
    res = _finish(g, tpl, cfg, opt, run, used, ok, t0)
    if not ok:
        res.message = f"best f_test {res.f_test:.3e} above target {opt.target_f:.1e} after {used} restarts"
    return res


def compile1_device(w, cfg: EnergyConfig = DEFAULT_ENERGIES, opt: OptimizerConfig = OptimizerConfig()) -> CompileResult:
    """Fit deg/idle/deg on the single-junction device to an SU(2) target."""
    t0 = time.perf_counter()
    w = _as_target(w, 2)
    tpl = one_qubit_device_template()
    run, used, ok = _compile_box(w.matrix, tpl, cfg, opt)
    res = _finish(w, tpl, cfg, opt, run, used, ok, t0)
    if not ok:
        res.message = f"best f_test {res.f_test:.3e} above target {opt.target_f:.1e} after {used} restarts"
    return res


def _compile_embedded_k(g4: np.ndarray, tpl: Template, cfg: EnergyConfig, opt: OptimizerConfig):
    """Three free times, the fourth fixed by the total-time constraint."""
    total = tpl.total_time
    spectra, hams = tpl.spectra(cfg), tpl.hamiltonians(cfg)

    def full(x):
        return np.append(x, total - np.sum(x))

    def fg(x):
        f, gr = _value_and_grad(g4, full(x), spectra, hams)
        return f, gr[:3] - gr[3]

    cons = [{"type": "ineq", "fun": lambda x: total - np.sum(x), "jac": lambda x: -np.ones(3)}]

    def run_one(i: int) -> _Run:
        x0 = _rng(opt.seed, i).dirichlet(np.ones(4))[:3] * total
        res = minimize(fg, x0, jac=True, method="SLSQP", bounds=[(0.0, total)] * 3, constraints=cons,
                       options={"maxiter": opt.max_iters, "ftol": 1e-18})
        x = np.clip(res.x, 0.0, total)
        excess = np.sum(x) - total
        if excess > 0:
            x = x * (total / np.sum(x))
        t = full(x)
        t[3] = max(t[3], 0.0)
        return _Run(i, t, _value_and_grad(g4, t, spectra, hams)[0])

    return _multistart(run_one, opt)


def compile1_embedded(w, side: str = "second", k: int | None = None, cfg: EnergyConfig = DEFAULT_ENERGIES,
                      opt: OptimizerConfig = OptimizerConfig(), k_max: int = 100) -> CompileResult:
    """Realise ``I (x) W`` or ``W (x) I`` with four letters of total time ``4 k pi / dE``.

    With ``k=None`` the smallest ``k`` in ``1..k_max`` for which a restart
    reaches the target is used. The search always runs on the second-qubit
    template; by qubit-swap symmetry the same times serve the first qubit,
    so both sides return identical time vectors.
    """
    t0 = time.perf_counter()
    w = _as_target(w, 2)
    name = f"i-kron-{w.name}" if side == "second" else f"{w.name}-kron-i"
    g_second = tensor(np.eye(2), w.matrix)
    g_side = g_second if side == "second" else tensor(w.matrix, np.eye(2))
    target = GateTarget(name, 4, g_side, w.params)

    ks = [k] if k is not None else range(1, k_max + 1)
    best = None
    for kk in ks:
        if kk < 1:
            raise ValueError(f"k must be >= 1, got {kk}")
        search = embedded_template("second", kk, cfg)
        run, used, ok = _compile_embedded_k(g_second, search, cfg, opt)
        tpl = embedded_template(side, kk, cfg)
        res = _finish(target, tpl, cfg, opt, run, used, ok, t0, k=kk)
        if ok:
            log.info("embedded %s converged at k=%d (f=%.2e)", name, kk, res.f_test)
            return res
        if best is None or res.f_test < best.f_test:
            best = res
    best.message = (f"no restart reached target {opt.target_f:.1e} for k in {ks[0]}..{ks[-1]}; "
                    f"best f_test {best.f_test:.3e} at k={best.k} (t_tot={best.total_time:.4f}); "
                    "try a larger k")
    return best


# closed-form one-qubit schedules

class ClosedFormDomainError(ValueError):
    """The closed-form time formulas are not real-valued for these energies; use compile1_device."""


def _one_qubit_eval(bits, times, cfg) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for e, t in zip(bits, times):
        w, v = spectral1(cfg, e)
        u = expm_from_spectral(w, v, t) @ u
    return u


def _radicand(x: float, what: str) -> float:
    if x < -1e-15:
        raise ClosedFormDomainError(f"{what} is negative ({x:.3e}); use compile1_device instead")
    return max(x, 0.0)


def _unit_arg(x: float, what: str) -> float:
    if abs(x) > 1 + 1e-15:
        raise ClosedFormDomainError(f"{what} = {x:.6f} lies outside [-1, 1]; use compile1_device instead")
    return min(1.0, max(-1.0, x))


def _branches(a: float, b: float, cfg: EnergyConfig, b_offset: float):
    """Candidate (t1, t2) pairs: the principal branch first, then the other inverse-trig solutions."""
    de, ej = splitting(cfg), cfg.ej
    p1, p2 = 4 * math.pi / ej, 4 * math.pi / de
    for label, a_, b_ in (("principal", a, b), ("asin-reflected", a, math.pi - b),
                          ("acos-negated", -a, b), ("both", -a, math.pi - b)):
        t1 = 2 * (a_ + math.pi / 2) / ej
        t2 = 2 * (b_ + b_offset) / de
        yield label, t1 % p1, t2 % p2


def closed_form_schedule(gate: str, cfg: EnergyConfig = DEFAULT_ENERGIES, phi: float | None = None,
                         tol: float = 1e-9) -> tuple[np.ndarray, tuple[int, ...], str]:
    """Times, switch bits and formula branch of the analytic one-qubit schedules.

    NOT and sqrt-NOT are single degenerate-point letters. Hadamard and PhS use
    degenerate/idle/degenerate with ``t3 = t1``; the formula branch is the
    first one whose execution matches the target to ``tol`` entrywise.
    """
    name = gate.lower().replace("_", "-")
    if name == "sqrtnot":
        name = "sqrt-not"
    if name == "not":
        return np.array([math.pi / cfg.ej]), (0,), "principal"
    if name == "sqrt-not":
        return np.array([math.pi / (2 * cfg.ej)]), (0,), "principal"

    ec, de = cfg.ec, splitting(cfg)
    if name == "had":
        target = library("had").matrix
        a = math.acos(math.sqrt(_unit_arg((cfg.ej + ec) / (2 * ec), "(E_J + E_c)/(2 E_c)")))
        b = math.asin(_unit_arg(de / (math.sqrt(2) * ec), "dE/(sqrt2 E_c)"))
        offset = math.pi
    elif name == "phs":
        phi = math.pi / 2 if phi is None else float(phi)
        target = library("phs", phi).matrix
        cos_half = math.cos(phi / 2)
        if abs(cos_half) < 1e-15:
            raise ClosedFormDomainError("cos(phi/2) = 0; use compile1_device instead")
        inner = _radicand(-1 + 2 * ec**2 / de**2 + math.cos(phi), "inner radicand")
        outer = _radicand(2 - math.sqrt(2) * de * math.sqrt(inner) / (ec * cos_half), "outer radicand")
        a = math.acos(_unit_arg(0.5 * math.sqrt(outer), "acos argument"))
        b = math.asin(_unit_arg(de * math.sin(phi / 2) / ec, "asin argument"))
        offset = 0.0
    else:
        raise ValueError(f"no closed form for gate {gate!r}; expected not, sqrt-not, had or phs")

    bits = (0, 1, 0)
    for label, t1, t2 in _branches(a, b, cfg, offset):
        times = np.array([t1, t2, t1])
        if max_abs(_one_qubit_eval(bits, times, cfg) - target) <= tol:
            log.debug("closed form %s uses branch %s", name, label)
            return times, bits, label
    raise ClosedFormDomainError(f"no formula branch reproduces {name} at {cfg}; use compile1_device instead")


def closed_form_times(gate: str, cfg: EnergyConfig = DEFAULT_ENERGIES, phi: float | None = None) -> np.ndarray:
    return closed_form_schedule(gate, cfg, phi)[0]


def closed_form_command(gate: str, cfg: EnergyConfig = DEFAULT_ENERGIES, phi: float | None = None) -> Command:
    times, bits, _ = closed_form_schedule(gate, cfg, phi)
    name = gate.lower()
    if name == "phs":
        name = library("phs", phi).label
    return command_from_times(name, bits, times, cfg)

