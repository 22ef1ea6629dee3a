"""Gate application by partial projection.

To act on qubit i the signal is split into the two partial projections
psi_0 and psi_1: copies are down/up-converted by exp(-+j w_i t) and passed
through comb filters keeping the harmonics of the other qubits. The gate then
rebuilds the signal as

    [U00 phi_0 + U10 phi_1] psi_0 + [U01 phi_0 + U11 phi_1] psi_1

where phi_0 = exp(+j w_i t) and phi_1 = exp(-j w_i t). Only the addressed
qubit's carriers are touched; no full spectral decomposition is needed.

Partial projections are tagged with the reduced layout (qubit i removed,
later qubits shifted down by one), so a controlled gate can address its
target inside a projected branch.
"""

import logging
from dataclasses import dataclass

from .errors import DomainError
from .filters import IDEAL, CombFilterSpec, FilterModel, comb_filter, sublattice
from .oracle import GateU2, check_qubit
from .signal import Signal, multiply

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PartialProjectionPair:
    """The (n-1)-qubit partial projections of a signal on one qubit.

    Args:
        qubit: Addressed qubit in the parent layout
        psi0: Branch multiplying exp(+j w_i t) (qubit in state 0)
        psi1: Branch multiplying exp(-j w_i t) (qubit in state 1)
    """

    qubit: int
    psi0: Signal
    psi1: Signal

    def branch(self, bit: int) -> Signal:
        return self.psi1 if bit else self.psi0


def carrier_tones(signal: Signal, qubit: int) -> tuple[Signal, Signal]:
    """phi_0 and phi_1 of `qubit` on the signal's backend and layout."""
    harmonic = signal.layout.harmonics[qubit]
    return signal.tone(harmonic), signal.tone(-harmonic)


def partial_project(
    signal: Signal, qubit: int, model: FilterModel = IDEAL
) -> PartialProjectionPair:
    """Split a signal into the partial projections of `qubit`."""
    layout = signal.layout
    check_qubit(qubit, layout.num_qubits)
    harmonic = layout.harmonics[qubit]
    reduced = layout.without_qubit(qubit)
    spec = CombFilterSpec(sublattice(layout, qubit), model)
    psi0 = comb_filter(multiply(signal.tone(-harmonic), signal), spec)
    psi1 = comb_filter(multiply(signal.tone(harmonic), signal), spec)
    return PartialProjectionPair(
        qubit, psi0.with_layout(reduced), psi1.with_layout(reduced)
    )


def remodulate(pair: PartialProjectionPair, parent: Signal) -> Signal:
    """phi_0 psi_0 + phi_1 psi_1 on the parent's layout (inverse of projection)."""
    phi0, phi1 = carrier_tones(parent, pair.qubit)
    return multiply(phi0, pair.psi0) + multiply(phi1, pair.psi1)


def collapse(pair: PartialProjectionPair, parent: Signal, bit: int) -> Signal:
    """Unnormalized projected signal phi_bit psi_bit."""
    phi0, phi1 = carrier_tones(parent, pair.qubit)
    return multiply(phi1 if bit else phi0, pair.branch(bit))


def apply_gate_signal(
    signal: Signal, gate: GateU2, qubit: int, model: FilterModel = IDEAL
) -> Signal:
    """Apply a single-qubit gate to `qubit` with analog multiply/add operations."""
    pair = partial_project(signal, qubit, model)
    u00, u01, u10, u11 = gate.entries
    phi0, phi1 = carrier_tones(signal, qubit)
    column0 = phi0 * u00 + phi1 * u10
    column1 = phi0 * u01 + phi1 * u11
    logger.debug(f"Applying {gate!r} to qubit {qubit} of {signal!r}")
    return multiply(column0, pair.psi0) + multiply(column1, pair.psi1)


def reduced_index(qubit: int, removed: int) -> int:
    """Position of `qubit` in a layout with `removed` taken out."""
    return qubit - 1 if qubit > removed else qubit


def apply_controlled_signal(
    signal: Signal,
    gate: GateU2,
    control: int,
    target: int,
    model: FilterModel = IDEAL,
) -> Signal:
    """Apply `gate` to `target` in the control=1 branch, pass the other through."""
    n = signal.layout.num_qubits
    check_qubit(control, n)
    check_qubit(target, n)
    if control == target:
        raise DomainError(f"Control and target are both qubit {control}")
    pair = partial_project(signal, control, model)
    transformed = apply_gate_signal(
        pair.psi1, gate, reduced_index(target, control), model
    )
    phi0, phi1 = carrier_tones(signal, control)
    return multiply(phi0, pair.psi0) + multiply(phi1, transformed)
