"""Fidelity measures, dressed-state ensembles and random unitaries."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .oracle import StateVector
from .utils import SeedLike, as_generator

logger = logging.getLogger(__name__)

HERMITIAN_ATOL = 1e-10
EIGENVALUE_FLOOR = -1e-10
# eigenvalues of unit-trace matrices below this are round-off
SQRT_ROUNDOFF_FLOOR = 1e-13
DRESSING_SCALE = math.sqrt(2) - 1


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A positive semi-definite 2**n x 2**n matrix with positive trace.

    Unit trace is not required; fidelities normalize by the traces.
    """

    matrix: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DomainError(f"Density matrix must be square, got {matrix.shape}")
        dim = matrix.shape[0]
        if dim < 1 or dim & (dim - 1):
            raise DomainError(f"Density matrix dimension {dim} is not a power of two")
        if not np.allclose(matrix, matrix.conj().T, atol=HERMITIAN_ATOL):
            raise DomainError("Density matrix is not Hermitian")
        if np.linalg.eigvalsh(matrix).min() < EIGENVALUE_FLOOR:
            raise DomainError("Density matrix has negative eigenvalues")
        if np.trace(matrix).real <= 0:
            raise DomainError("Density matrix has non-positive trace")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "num_qubits", dim.bit_length() - 1)

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        """|psi><psi| of a nonzero (possibly unnormalized) state."""
        if state.squared_norm == 0:
            raise DomainError("Cannot build a projector from the zero vector")
        a = state.amplitudes
        return cls(np.outer(a, a.conj()))

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dim = 2**num_qubits
        return cls(np.eye(dim) / dim)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalized(self) -> "DensityMatrix":
        return DensityMatrix(self.matrix / self.trace)

    def expectation(self, observable: np.ndarray) -> float:
        """Tr(rho O) / Tr(rho) for a Hermitian observable."""
        return float(np.trace(self.matrix @ observable).real) / self.trace

    def __repr__(self) -> str:
        return f"DensityMatrix(num_qubits={self.num_qubits}, trace={self.trace:.6g})"


def psd_sqrt(matrix: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Square root of a Hermitian matrix.

    Eigenvalues at or below `floor` are treated as 0, which also clips the
    negative ones.
    """
    hermitian = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(hermitian)
    roots = np.sqrt(np.where(values > floor, values, 0.0))
    return (vectors * roots) @ vectors.conj().T


def fidelity_pure(a: StateVector, b: StateVector) -> float:
    """|<a|b>| / (|a| |b|), a number between 0 and 1."""
    if a.dimension != b.dimension:
        raise DomainError(f"Dimension mismatch: {a.dimension} vs {b.dimension}")
    if a.squared_norm == 0 or b.squared_norm == 0:
        raise DomainError("Fidelity of the zero vector is undefined")
    overlap = abs(np.vdot(a.amplitudes, b.amplitudes))
    return min(float(overlap / (a.norm * b.norm)), 1.0)


def fidelity_mixed(rho_hat: DensityMatrix, rho: DensityMatrix) -> float:
    """Tr sqrt(sqrt(rho_hat) rho sqrt(rho_hat)) / sqrt(Tr rho Tr rho_hat).

    For pure states this reduces to fidelity_pure (not its square).
    """
    if rho_hat.dimension != rho.dimension:
        raise DomainError(f"Dimension mismatch: {rho_hat.dimension} vs {rho.dimension}")
    if rho.trace <= 0 or rho_hat.trace <= 0:
        raise DomainError("Fidelity of a zero-trace matrix is undefined")
    # unit trace keeps the round-off floor on the same scale for both roots
    a = rho_hat.matrix / rho_hat.trace
    b = rho.matrix / rho.trace
    root = psd_sqrt(a, SQRT_ROUNDOFF_FLOOR)
    inner = psd_sqrt(root @ b @ root, SQRT_ROUNDOFF_FLOOR)
    value = float(np.trace(inner).real)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class DressedState:
    """A bare state rescaled and buried in a unit-norm complex noise vector.

    Args:
        amplitudes: a = scale * alpha + noise
        scale: s = sqrt(2) - 1
        noise: nu = z / |z| for a standard complex Gaussian z
    """

    amplitudes: np.ndarray
    scale: float
    noise: np.ndarray

    @property
    def state(self) -> StateVector:
        return StateVector(self.amplitudes)

    def normalized(self) -> StateVector:
        return self.state.normalized()


def dress(
    state: StateVector, seed: SeedLike = None, scale: float = DRESSING_SCALE
) -> DressedState:
    """Dress a normalized state with one draw of complex Gaussian noise."""
    if abs(state.norm - 1) > 1e-9:
        raise DomainError(f"Dressing needs a normalized state, norm is {state.norm}")
    rng = as_generator(seed)
    z = rng.standard_normal(state.dimension) + 1j * rng.standard_normal(state.dimension)
    noise = z / np.linalg.norm(z)
    return DressedState(scale * state.amplitudes + noise, scale, noise)


def haar_unitary(dim: int, seed: SeedLike = None) -> np.ndarray:
    """Haar-random dim x dim unitary.

    QR of a complex Ginibre matrix, with R's diagonal phases moved into Q so
    the distribution is invariant.
    """
    if dim < 1:
        raise DomainError(f"Unitary dimension must be >= 1, got {dim}")
    rng = as_generator(seed)
    shape = (dim, dim)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diagonal = np.diag(r)
    return q * (diagonal / np.abs(diagonal))


def random_state(num_qubits: int, seed: SeedLike = None) -> StateVector:
    """Normalized state with complex Gaussian amplitudes (uniform on the sphere)."""
    rng = as_generator(seed)
    dim = 2**num_qubits
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(z / np.linalg.norm(z))
