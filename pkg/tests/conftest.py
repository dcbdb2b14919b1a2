import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def hermitian(n: int, scale: float = 1.0):
    """Strategy: random n x n Hermitian matrices with entries of size ~scale."""
    entries = st.lists(st.floats(-1, 1, allow_nan=False), min_size=2 * n * n, max_size=2 * n * n)

    def build(xs):
        a = np.array(xs[: n * n]).reshape(n, n) + 1j * np.array(xs[n * n:]).reshape(n, n)
        return scale * (a + a.conj().T) / 2

    return entries.map(build)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
