"""Dense linear algebra and state helpers for spaces of dimension <= 25.

States, density matrices and operators are plain ``numpy`` complex arrays;
the ``check_*`` functions enforce the invariants each kind must satisfy.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .constants import (
    HERMITIAN_TOL,
    MAX_DIM,
    MAX_KRON_DIM,
    NORM_TOL,
    POSITIVITY_FLOOR,
    TRACE_TOL,
    UNITARY_TOL,
)


@dataclass(frozen=True)
class HilbertSpace:
    """Computational block of size ``M`` followed by ``N`` auxiliary levels."""

    computational_dim: int
    noncomputational_dim: int = 0
    basis_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.computational_dim < 1:
            raise ValueError("computational dimension must be >= 1")
        if self.noncomputational_dim < 0:
            raise ValueError("non-computational dimension must be >= 0")
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels", tuple(str(k) for k in range(self.dim)))
        if len(self.basis_labels) != self.dim:
            raise ValueError("need one label per basis state")
        if len(set(self.basis_labels)) != self.dim:
            raise ValueError("basis labels must be unique")

    @property
    def dim(self) -> int:
        return self.computational_dim + self.noncomputational_dim

    def basis(self, label) -> np.ndarray:
        k = self.basis_labels.index(label) if isinstance(label, str) else int(label)
        v = np.zeros(self.dim, dtype=complex)
        v[k] = 1.0
        return v


LAMBDA_SPACE = HilbertSpace(2, 1, ("0", "1", "2"))


def ket(amplitudes, normalize=True) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).ravel()
    if normalize:
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector cannot be normalized")
        v = v / n
    return v


def dm(state) -> np.ndarray:
    v = np.asarray(state, dtype=complex)
    return np.outer(v, v.conj())


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def check_state(v, tol=NORM_TOL) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1 or v.size > MAX_DIM:
        raise ValueError(f"state must be a vector of length <= {MAX_DIM}")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError("state is not normalized")
    return v


def check_operator(a, tag="general", tol=None) -> np.ndarray:
    """Validate a square complex matrix; ``tag`` is hermitian, unitary or general."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("operator must be a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("operator has non-finite entries")
    if tag == "hermitian":
        if np.max(np.abs(a - a.conj().T), initial=0.0) > (tol or HERMITIAN_TOL):
            raise ValueError("operator is not Hermitian")
    elif tag == "unitary":
        if unitarity_error(a) > (tol or UNITARY_TOL):
            raise ValueError("operator is not unitary")
    elif tag != "general":
        raise ValueError(f"unknown operator tag {tag!r}")
    return a


def check_density(rho, tol=TRACE_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    check_operator(rho, "hermitian", tol=max(tol, HERMITIAN_TOL))
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError("density matrix trace differs from 1")
    if min_eigenvalue(rho) < POSITIVITY_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def unitarity_error(u) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(dag(u) @ u - np.eye(u.shape[-1]))))


def hermiticity_error(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - dag(a)), initial=0.0))


def min_eigenvalue(rho) -> float:
    rho = np.asarray(rho)
    herm = 0.5 * (rho + dag(rho))
    return float(np.min(np.linalg.eigvalsh(herm)))


def matrix_exponential(a, scale=1.0) -> np.ndarray:
    """``exp(scale * a)``.

    Hermitian ``a`` with purely imaginary or real ``scale`` goes through an
    eigendecomposition, which keeps ``exp(-i t H)`` unitary to rounding;
    anything else uses scipy's scaling-and-squaring Pade.
    """
    a = check_operator(a)
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {a.shape[0]} exceeds {MAX_DIM}")
    scale = complex(scale)
    if not np.isfinite(scale):
        raise ValueError("scale must be finite")
    if scale == 0:
        return np.eye(a.shape[0], dtype=complex)
    if hermiticity_error(a) <= HERMITIAN_TOL * max(1.0, np.max(np.abs(a))):
        w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
        return (v * np.exp(scale * w)) @ v.conj().T
    return linalg.expm(scale * a)


def expm_hermitian_batch(h: np.ndarray, dt) -> np.ndarray:
    """``exp(-i dt H_k)`` for a stack of Hermitian matrices."""
    w, v = np.linalg.eigh(h)
    phase = np.exp(-1j * np.asarray(dt)[..., None] * w) if np.ndim(dt) else np.exp(-1j * dt * w)
    return (v * phase[..., None, :]) @ dag(v)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with ``a`` as the slow index."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_KRON_DIM:
        raise ValueError("tensor product too large")
    return np.kron(a, b)


def trace_fidelity(u, v, m: int) -> float:
    """``|Tr_M[U V^dag]| / M``: the trace of ``U V^dag`` over its leading ``M`` diagonal entries.

    The product is formed on the full space first, so leakage out of the
    block in either operator lowers the value.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("operators must have equal shape")
    if m < 1 or m > u.shape[0]:
        raise ValueError("M must lie in [1, dim]")
    val = abs(np.trace((u @ v.conj().T)[:m, :m])) / m
    return float(min(val, 1.0))


def align_phase(u, reference) -> np.ndarray:
    """Multiply ``u`` by the global phase that best matches ``reference``."""
    ov = np.trace(reference.conj().T @ u)
    if abs(ov) == 0:
        return np.asarray(u)
    return u * np.exp(-1j * np.angle(ov))


def phase_distance(u, v) -> float:
    """Max-norm distance between ``u`` and ``v`` after global phase alignment."""
    return float(np.max(np.abs(align_phase(np.asarray(u), np.asarray(v)) - v)))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def ladder(levels: int) -> np.ndarray:
    """Annihilation operator truncated to ``levels`` states."""
    return np.diag(np.sqrt(np.arange(1, levels)), 1).astype(complex)
