"""Dense complex linear algebra on operators and state vectors.

Operators are square ``complex128`` numpy arrays and states are 1-D
``complex128`` arrays. Composite indices follow the left-factor-most-significant
convention: in ``H_a (x) H_b`` the pair ``(i, j)`` lives at ``i * dim_b + j``,
which is exactly what :func:`numpy.kron` produces.
"""
from __future__ import annotations

import os

import numpy as np
from scipy.stats import unitary_group

from .errors import CapacityError, ContractError

UNITARITY_TOL = 1e-10
NORM_TOL = 1e-10
HERMITICITY_TOL = 1e-12
SCHMIDT_TOL = 1e-8
DEFAULT_MAX_DIM = 2**20

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def max_dim() -> int:
    """Dense capacity cap; the ``QPC_MAX_DIM`` environment variable overrides it."""
    raw = os.environ.get("QPC_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise ContractError(f"QPC_MAX_DIM must be an integer, got {raw!r}") from None
    if value < 1:
        raise ContractError(f"QPC_MAX_DIM must be positive, got {value}")
    return value


def check_capacity(dim: int, what: str = "space") -> None:
    cap = max_dim()
    if dim > cap:
        raise CapacityError(f"{what} dimension {dim} exceeds max_dim {cap}")


def as_operator(a, name: str = "operator") -> np.ndarray:
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ContractError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def as_state(psi, name: str = "state") -> np.ndarray:
    arr = np.asarray(psi, dtype=complex)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ContractError(f"{name} must be a non-empty vector, got shape {arr.shape}")
    return arr


def basis_state(dim: int, index: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise ContractError(f"basis index {index} out of range for dimension {dim}")
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def tensor_op(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b``; ``a`` indexes the blocks."""
    a = as_operator(a, "a")
    b = as_operator(b, "b")
    check_capacity(a.shape[0] * b.shape[0], "tensor product")
    return np.kron(a, b)


def tensor_state(a, b) -> np.ndarray:
    a = as_state(a, "a")
    b = as_state(b, "b")
    check_capacity(a.shape[0] * b.shape[0], "tensor product")
    return np.kron(a, b)


def apply(a, psi) -> np.ndarray:
    a = as_operator(a)
    psi = as_state(psi)
    if a.shape[0] != psi.shape[0]:
        raise ContractError(f"operator dim {a.shape[0]} does not match state dim {psi.shape[0]}")
    return a @ psi


def is_unitary(a, tol: float = UNITARITY_TOL) -> bool:
    if tol <= 0:
        raise ContractError("tol must be positive")
    a = as_operator(a)
    eye = np.eye(a.shape[0])
    return bool(np.linalg.norm(a.conj().T @ a - eye) <= tol)


def is_hermitian(h, tol: float = HERMITICITY_TOL) -> bool:
    h = as_operator(h)
    return bool(np.linalg.norm(h - h.conj().T) <= tol)


def hermitian_exp(h, theta: float) -> np.ndarray:
    """Return ``exp(i * theta * h)`` via the eigendecomposition of ``h``.

    The result is unitary to eigensolver rounding, independent of ``theta``.
    """
    h = as_operator(h, "h")
    if not is_hermitian(h):
        raise ContractError("hermitian_exp requires a Hermitian matrix")
    # symmetrize so eigh sees exactly Hermitian input
    evals, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    return (vecs * np.exp(1j * theta * evals)) @ vecs.conj().T


def schmidt_coefficients(psi, dim_a: int, dim_b: int) -> np.ndarray:
    psi = as_state(psi)
    if dim_a < 1 or dim_b < 1 or dim_a * dim_b != psi.shape[0]:
        raise ContractError(f"cannot split state of dim {psi.shape[0]} as {dim_a} x {dim_b}")
    return np.linalg.svd(psi.reshape(dim_a, dim_b), compute_uv=False)


def schmidt_rank(psi, dim_a: int, dim_b: int, tol: float = SCHMIDT_TOL) -> int:
    """Number of Schmidt coefficients above ``tol`` across the ``dim_a | dim_b`` cut."""
    s = schmidt_coefficients(psi, dim_a, dim_b)
    return max(1, int(np.count_nonzero(s > tol)))


def phase_distance(a, b) -> float:
    """``min_phi ||a - exp(i phi) b||_F``.

    Evaluated directly at the optimal phase rather than through
    ``sqrt(2d - 2|tr(a^dag b)|)``, which loses half the digits near zero.
    """
    a = as_operator(a, "a")
    b = as_operator(b, "b")
    if a.shape != b.shape:
        raise ContractError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    overlap = np.vdot(b, a)  # tr(b^dag a)
    mag = abs(overlap)
    phase = overlap / mag if mag > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized complex Gaussian vector (Haar-distributed on the sphere)."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.exp(2j * np.pi * rng.random()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2
