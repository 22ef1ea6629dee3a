"""Standard single-qubit gate matrices."""

import numpy as np

from .errors import DomainError
from .oracle import STRICT_UNITARITY_TOLERANCE, GateU2

_SQRT_HALF = 1 / np.sqrt(2)

IDENTITY = GateU2(np.eye(2), STRICT_UNITARITY_TOLERANCE, "i")
HADAMARD = GateU2(
    [[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]],
    STRICT_UNITARITY_TOLERANCE,
    "h",
)
PAULI_X = GateU2([[0, 1], [1, 0]], STRICT_UNITARITY_TOLERANCE, "x")
PAULI_Y = GateU2([[0, -1j], [1j, 0]], STRICT_UNITARITY_TOLERANCE, "y")
PAULI_Z = GateU2([[1, 0], [0, -1]], STRICT_UNITARITY_TOLERANCE, "z")
PHASE_S = GateU2([[1, 0], [0, 1j]], STRICT_UNITARITY_TOLERANCE, "s")
PHASE_S_DAGGER = GateU2([[1, 0], [0, -1j]], STRICT_UNITARITY_TOLERANCE, "sdg")
PHASE_T = GateU2(
    [[1, 0], [0, np.exp(1j * np.pi / 4)]], STRICT_UNITARITY_TOLERANCE, "t"
)

# single-qubit gates addressable by name in circuit files
NAMED_GATES: dict[str, GateU2] = {
    gate.name: gate for gate in (HADAMARD, PAULI_X, PAULI_Y, PAULI_Z, PHASE_S, PHASE_T)
}

# controlled gates addressable by name; the value is the gate on the target
NAMED_CONTROLLED_GATES: dict[str, GateU2] = {"cnot": PAULI_X}


def named_gate(name: str) -> GateU2:
    """Look up a named single-qubit gate (case-insensitive)."""
    try:
        return NAMED_GATES[name.lower()]
    except KeyError:
        raise DomainError(f"Unknown gate name {name!r}") from None
