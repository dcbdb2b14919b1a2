import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmlang.compiler import (
    ClosedFormDomainError,
    OptimizerConfig,
    closed_form_command,
    closed_form_schedule,
    compile1_device,
    compile1_embedded,
    compile2,
    embedded_template,
    embedded_total_time,
    evolve,
    f_test,
    grad_f,
    one_qubit_device_template,
    two_qubit_template,
)
from qmlang.device import DEFAULT_ENERGIES, EnergyConfig, H1_STATE, H2_STATE, H3_STATE, H4_STATE, splitting
from qmlang.gates import from_matrix, library, phase_fidelity
from qmlang.linalg import max_abs, schmidt_rank
from qmlang.qml import execute

CNOT = library("cnot").matrix
TPL2 = two_qubit_template()
FAST = OptimizerConfig(restarts=32)


def fd_grad(g, t, tpl, h=1e-5):
    return np.array([(f_test(g, t + h * e, tpl) - f_test(g, t - h * e, tpl)) / (2 * h)
                     for e in np.eye(len(t))])


def test_template_shapes():
    assert len(TPL2) == 15
    assert TPL2.sequence[:4] == (H1_STATE, H2_STATE, H3_STATE, H4_STATE)
    assert TPL2.sequence[-1] == H3_STATE
    assert embedded_template("second").sequence == (H4_STATE, H1_STATE, H4_STATE, H1_STATE)
    assert embedded_template("first").sequence == (H3_STATE, H1_STATE, H3_STATE, H1_STATE)
    assert one_qubit_device_template().sequence == (0, 1, 0)
    with pytest.raises(ValueError):
        embedded_template("middle")


def test_optimizer_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(t_min=5, t_max=1)


@given(st.lists(st.floats(0, 1000), min_size=15, max_size=15))
def test_f_test_trace_identity(times):
    u = evolve(times, TPL2)
    expected = 8 - 2 * np.trace(CNOT.conj().T @ u).real
    assert abs(f_test(CNOT, times, TPL2) - expected) <= 1e-10


def test_f_test_examples(rng):
    t = rng.uniform(0, 1000, 15)
    u = evolve(t, TPL2)
    assert f_test(u, t, TPL2) == 0
    assert f_test(-u, t, TPL2) == pytest.approx(16)
    with pytest.raises(ValueError):
        f_test(CNOT, t[:14], TPL2)


def test_grad_zero_at_exact_point(rng):
    t = rng.uniform(0, 1000, 15)
    assert np.max(np.abs(grad_f(evolve(t, TPL2), t, TPL2))) <= 1e-10


def test_grad_at_zero_times():
    g = CNOT
    hams = TPL2.hamiltonians(DEFAULT_ENERGIES)
    expected = [-2 * np.trace((g - np.eye(4)).conj().T @ (-1j * h)).real for h in hams]
    assert np.allclose(grad_f(g, np.zeros(15), TPL2), expected, atol=1e-12)


@pytest.mark.parametrize("tpl, target", [
    (TPL2, CNOT),
    (one_qubit_device_template(), library("had").matrix),
    (embedded_template("second", 90), library("i-kron-not").matrix),
])
def test_grad_finite_difference(tpl, target, rng):
    for _ in range(5):
        t = rng.uniform(0, 1000, len(tpl))
        an, fd = grad_f(target, t, tpl), fd_grad(target, t, tpl)
        assert np.all(np.abs(an - fd) <= 1e-5 * np.abs(an))


def test_compile2_planted_and_deterministic(rng):
    target = from_matrix(evolve(rng.uniform(0, 1000, 15), TPL2), name="planted")
    a = compile2(target, opt=FAST)
    b = compile2(target, opt=FAST)
    assert a.converged and a.f_test <= 1e-8
    assert np.array_equal(a.times, b.times) and a.restarts_used == b.restarts_used
    assert a.phase_fidelity >= 1 - a.f_test / 8 - 1e-12
    assert np.all((a.times >= 0) & (a.times <= 1000))


def test_compile2_workers_do_not_change_result(rng):
    target = from_matrix(evolve(rng.uniform(0, 1000, 15), TPL2))
    serial = compile2(target, opt=FAST)
    threaded = compile2(target, opt=OptimizerConfig(restarts=32, workers=3))
    assert np.array_equal(serial.times, threaded.times)


def test_compile2_rejects_non_su():
    with pytest.raises(ValueError, match="SU"):
        compile2(np.eye(4)[[0, 1, 3, 2]])


def test_compile2_reports_non_convergence():
    res = compile2(CNOT, opt=OptimizerConfig(restarts=1, max_iters=1))
    assert not res.converged
    assert "above target" in res.message
    assert res.f_test == pytest.approx(f_test(CNOT, res.times, TPL2))


@pytest.mark.parametrize("name", ["not", "sqrt-not", "had", "phs"])
def test_compile1_device(name):
    res = compile1_device(library(name))
    assert res.converged and res.f_test <= 1e-10
    assert max_abs(execute(res.to_command()) - library(name).matrix) <= 1e-5


@pytest.mark.parametrize("name", ["not", "had", "sqrt-not", "phs"])
def test_compile1_embedded_mirror_and_product(name):
    w = library(name)
    second = compile1_embedded(w, "second", 90)
    first = compile1_embedded(w, "first", 90)
    assert second.converged and second.f_test <= 1e-8
    assert np.array_equal(second.times, first.times)
    assert first.f_test == pytest.approx(second.f_test, abs=1e-14)
    assert abs(second.total_time - embedded_total_time(90, DEFAULT_ENERGIES)) <= 1e-12 * second.total_time
    for res in (first, second):
        assert schmidt_rank(execute(res.to_command()), tol=1e-5) == 1
    assert "-kron-i" in first.target_name and second.target_name.startswith("i-kron-")


def test_embedded_identity_feasible_zero():
    tpl = embedded_template("second", 7)
    t = np.array([0, 0, 0, tpl.total_time])
    assert f_test(np.eye(4), t, tpl) <= 1e-20


def test_embedded_scan_finds_small_k():
    res = compile1_embedded(library("phs"), "second")
    assert res.converged and res.k == 2


def test_embedded_infeasible_k_suggests_larger_k():
    res = compile1_embedded(library("not"), "second", 1, opt=OptimizerConfig(restarts=8))
    assert not res.converged and "larger k" in res.message


def test_embedded_total_time():
    assert embedded_total_time(90, DEFAULT_ENERGIES) == pytest.approx(90 * 4 * math.pi / splitting(DEFAULT_ENERGIES))


def test_closed_form_not_and_sqrt_not():
    t, bits, _ = closed_form_schedule("not")
    assert bits == (0,) and t[0] == pytest.approx(31.41593, abs=1e-5)
    for name in ("not", "sqrt-not"):
        assert max_abs(execute(closed_form_command(name)) - library(name).matrix) <= 1e-12


def test_closed_form_hadamard():
    t, bits, branch = closed_form_schedule("had")
    assert bits == (0, 1, 0) and branch == "principal"
    assert t[1] == pytest.approx(3.1397, abs=1e-4)
    assert t[0] == t[2]
    assert max_abs(execute(closed_form_command("had")) - library("had").matrix) <= 1e-9


@pytest.mark.parametrize("phi", [math.pi / 2, 0.4, 1.0, -0.7])
def test_closed_form_phs(phi):
    cmd = closed_form_command("phs", phi=phi)
    assert max_abs(execute(cmd) - library("phs", phi).matrix) <= 1e-9
    assert cmd.gate_name == library("phs", phi).label


def test_closed_form_domain_error():
    with pytest.raises(ClosedFormDomainError):
        closed_form_schedule("had", EnergyConfig(0.1, 2.5, 0.1))
    with pytest.raises(ValueError):
        closed_form_schedule("cnot")


def test_result_command_metadata():
    res = compile1_device(library("phs", 0.3))
    cmd = res.to_command()
    assert cmd.gate_name == "phs(0.3)" and cmd.dim == 2
    assert phase_fidelity(library("phs", 0.3).matrix, execute(cmd)) >= 1 - res.f_test / 4 - 1e-12
