"""State-vector reference simulator.

Every signal-domain operation in the package is checked against the plain
linear algebra in this module. Qubit i is bit i of the basis index, so
x = x_0 * 2**0 + ... + x_{n-1} * 2**(n-1). When the amplitude array is
reshaped to ``[2] * n`` (C order), qubit i therefore lives on axis n - 1 - i.

States need not be normalized: collapsed states are unnormalized, and any
operation that needs probabilities normalizes explicitly.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RejectedGateError

logger = logging.getLogger(__name__)

# Admits matrices rounded to four decimals; the printed example gate with
# U01 and U10 imaginary parts 0.8460 vs 0.8640 sits at about 0.031.
DEFAULT_UNITARITY_TOLERANCE = 5e-2
STRICT_UNITARITY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the 2**n computational basis states.

    Args:
        amplitudes: Sequence of 2**n complex amplitudes, indexed by x

    A zero-qubit vector (a single amplitude) appears only as the demodulated
    form of a fully reduced partial projection.
    """

    amplitudes: np.ndarray
    num_qubits: int = field(init=False)

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        size = amplitudes.size
        if size == 0 or size & (size - 1):
            raise DomainError(f"Amplitude count {size} is not a power of two")
        if not np.all(np.isfinite(amplitudes)):
            raise DomainError("Amplitudes must be finite")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "num_qubits", size.bit_length() - 1)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @property
    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        norm = self.norm
        if norm == 0:
            raise DomainError("Cannot normalize the zero vector")
        return StateVector(self.amplitudes / norm)

    def probabilities(self) -> np.ndarray:
        """Born probabilities of the normalized state."""
        weights = np.abs(self.amplitudes) ** 2
        total = weights.sum()
        if total == 0:
            raise DomainError("Zero vector has no outcome distribution")
        return weights / total

    def slice(self, qubit: int, bit: int) -> "StateVector":
        """Amplitudes with `qubit` fixed to `bit`, as an (n-1)-qubit vector."""
        check_qubit(qubit, self.num_qubits)
        axis = self.num_qubits - 1 - qubit
        return StateVector(np.take(self._tensor(), bit, axis=axis).reshape(-1))

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return self.dimension == other.dimension and bool(
            np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol)
        )

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape([2] * self.num_qubits)

    def __len__(self) -> int:
        return self.dimension

    def __repr__(self) -> str:
        return (
            f"StateVector(num_qubits={self.num_qubits}, "
            f"amplitudes={self.amplitudes!r})"
        )


@dataclass(frozen=True, eq=False)
class GateU2:
    """A single-qubit gate as a complex 2x2 matrix.

    Args:
        matrix: 2x2 complex matrix [[U00, U01], [U10, U11]]
        tolerance: Largest accepted entry of |U^dagger U - I|; use
            ``math.inf`` for deliberately non-unitary (hardware-perturbed) gates

    Raises:
        RejectedGateError: If the matrix fails the unitarity tolerance
    """

    matrix: np.ndarray
    tolerance: float = DEFAULT_UNITARITY_TOLERANCE
    name: str | None = None

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (2, 2):
            raise DomainError(f"Gate matrix must be 2x2, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise DomainError("Gate matrix entries must be finite")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        error = self.unitarity_error
        if error > self.tolerance:
            raise RejectedGateError(
                f"Gate fails unitarity check: error {error:.3g} > "
                f"tolerance {self.tolerance:.3g}",
                unitarity_error=error,
                tolerance=self.tolerance,
            )

    @property
    def unitarity_error(self) -> float:
        product = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(product - np.eye(2))))

    @property
    def entries(self) -> tuple[complex, complex, complex, complex]:
        """(U00, U01, U10, U11)."""
        m = self.matrix
        return complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1])

    def __matmul__(self, other: "GateU2") -> "GateU2":
        tolerance = max(self.tolerance, other.tolerance)
        return GateU2(self.matrix @ other.matrix, tolerance=tolerance)

    def __repr__(self) -> str:
        label = f"{self.name}, " if self.name else ""
        return f"GateU2({label}{self.matrix.tolist()!r})"


def check_qubit(qubit: int, num_qubits: int) -> None:
    """Raise DomainError unless 0 <= qubit < num_qubits."""
    if not 0 <= qubit < num_qubits:
        raise DomainError(f"Qubit {qubit} out of range for {num_qubits} qubits")


def basis_state(x: int, n: int) -> StateVector:
    """Return |x> on n qubits."""
    if n < 0 or not 0 <= x < 2**n:
        raise DomainError(f"Basis index {x} out of range for {n} qubits")
    amplitudes = np.zeros(2**n, dtype=complex)
    amplitudes[x] = 1.0
    return StateVector(amplitudes)


def apply_gate_oracle(state: StateVector, gate: GateU2, target: int) -> StateVector:
    """Apply a single-qubit gate to `target` by direct matrix product."""
    n = state.num_qubits
    check_qubit(target, n)
    axis = n - 1 - target
    tensor = np.tensordot(gate.matrix, state._tensor(), axes=([1], [axis]))
    tensor = np.moveaxis(tensor, 0, axis)
    return StateVector(tensor.reshape(-1))


def apply_controlled_oracle(
    state: StateVector, gate: GateU2, control: int, target: int
) -> StateVector:
    """Apply `gate` to `target` within the control=1 subspace."""
    n = state.num_qubits
    check_qubit(control, n)
    check_qubit(target, n)
    if control == target:
        raise DomainError(f"Control and target are both qubit {control}")
    tensor = state._tensor().copy()
    control_axis = n - 1 - control
    index = [slice(None)] * n
    index[control_axis] = 1
    branch = tensor[tuple(index)]
    # the control axis is gone from the branch, shifting later axes down
    target_axis = n - 1 - target
    if target_axis > control_axis:
        target_axis -= 1
    branch = np.tensordot(gate.matrix, branch, axes=([1], [target_axis]))
    tensor[tuple(index)] = np.moveaxis(branch, 0, target_axis)
    return StateVector(tensor.reshape(-1))


def subspace_weights(state: StateVector, qubit: int) -> tuple[float, float]:
    """Squared norms (q0, q1) of the bit=0 and bit=1 subspaces of `qubit`."""
    check_qubit(qubit, state.num_qubits)
    axis = state.num_qubits - 1 - qubit
    weights = np.abs(state._tensor()) ** 2
    other_axes = tuple(a for a in range(state.num_qubits) if a != axis)
    q0, q1 = weights.sum(axis=other_axes)
    return float(q0), float(q1)


def inner_oracle(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum_x conj(a_x) b_x."""
    if a.dimension != b.dimension:
        raise DomainError(
            f"Dimension mismatch: {a.num_qubits} vs {b.num_qubits} qubits"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def lift_gate(gate: GateU2, target: int, n: int) -> np.ndarray:
    """Full 2**n x 2**n matrix of a single-qubit gate (Kronecker lifting)."""
    check_qubit(target, n)
    full = np.eye(1, dtype=complex)
    for qubit in reversed(range(n)):
        factor = gate.matrix if qubit == target else np.eye(2)
        full = np.kron(full, factor)
    return full
