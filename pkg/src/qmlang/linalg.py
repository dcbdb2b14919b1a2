"""Dense complex matrix kernel for 2-, 4- and 8-dimensional operators.

Pauli matrices follow the usual convention sigma_z = diag(1, -1),
sigma_y = [[0, -i], [i, 0]]; basis index 0 is the sigma_z = +1 state.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10

_PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class NonHermitianError(ValueError):
    """Raised when a generator that must be Hermitian is not."""


def pauli(axis: str) -> np.ndarray:
    """Return the 2x2 Pauli matrix for ``axis`` in {"x", "y", "z", "i"}.

    A fresh array is returned on every call so callers may mutate it.
    """
    key = axis.lower()
    if key in ("identity", "id", "1"):
        key = "i"
    try:
        return _PAULI[key].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None


def tensor(*factors: np.ndarray) -> np.ndarray:
    """Kronecker product of the factors, leftmost factor = first qubit."""
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def embed(op: np.ndarray, site: int, n_qubits: int) -> np.ndarray:
    """Place a one-qubit operator on qubit ``site`` (0-based) of ``n_qubits``."""
    eye = _PAULI["i"]
    return tensor(*(op if k == site else eye for k in range(n_qubits)))


def hermiticity_defect(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def spectral(h: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition ``(w, v)`` of a Hermitian matrix, ``h = v diag(w) v^dagger``.

    Raises:
        NonHermitianError: if ``max|h - h^dagger|`` exceeds ``tol``.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    defect = hermiticity_defect(h)
    if defect > tol:
        raise NonHermitianError(f"matrix is not Hermitian: max|H - H^dagger| = {defect:.3e} > {tol:.1e}")
    # symmetrize so eigh sees an exactly Hermitian input
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def expm_from_spectral(w: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H)`` given the spectral pair of ``H``."""
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Propagator ``exp(-i t H)`` of a Hermitian generator.

    Computed by exponentiating the eigenvalues of ``H``, which is exact to
    rounding for the small matrices used here.
    """
    w, v = spectral(h)
    return expm_from_spectral(w, v, t)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``trace(A^dagger B)``."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))


def operator_schmidt(u: np.ndarray, tol: float = 0.0) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Operator Schmidt decomposition of a 4x4 operator on two qubits.

    ``U = sum_k c_k A_k (x) B_k`` with ``c_k >= 0`` sorted descending and the
    ``A_k``, ``B_k`` orthonormal under the Hilbert-Schmidt product. The
    decomposition is the SVD of the realigned matrix
    ``R[(i, k), (j, l)] = U[(i, j), (k, l)]``.

    Terms with ``c_k <= tol`` are dropped, so ``len(result)`` is the operator
    Schmidt rank at that tolerance.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (4, 4):
        raise ValueError(f"operator_schmidt expects a 4x4 matrix, got {u.shape}")
    # U[i j, k l] with i,k on qubit 1 and j,l on qubit 2
    realigned = u.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    left, coeffs, right = np.linalg.svd(realigned)
    terms = []
    for c, a, b in zip(coeffs, left.T, right):
        if c <= tol:
            continue
        terms.append((float(c), a.reshape(2, 2), b.reshape(2, 2)))
    return terms


def schmidt_rank(u: np.ndarray, tol: float = 1e-10) -> int:
    return len(operator_schmidt(u, tol=tol))
