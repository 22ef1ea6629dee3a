"""Running circuit programs on the signal engine."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import DomainError
from .measurement import (
    Histogram,
    MeasurementShot,
    MeasurementTree,
    Sampling,
    measure_qubit,
    sample_signal,
)
from .noise import NoiseConfig, NoisyChain
from .oracle import StateVector, apply_controlled_oracle, apply_gate_oracle
from .parser import CircuitProgram, ControlledGate, Gate1, Measure, MeasureAll
from .signal import Signal, demodulate
from .utils import SeedLike, as_generator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CircuitRun:
    """Final signal of a run plus the record of every measurement instruction."""

    signal: Signal
    measurements: tuple[MeasurementShot, ...] = ()

    @property
    def state(self) -> StateVector:
        return demodulate(self.signal)


def _initial(program: CircuitProgram, initial: StateVector | None) -> StateVector:
    state = program.initial_state if initial is None else initial
    if state.num_qubits != program.num_qubits:
        raise DomainError(
            f"Initial state has {state.num_qubits} qubits, "
            f"program has {program.num_qubits}"
        )
    return state


def _apply(
    chain: NoisyChain, signal: Signal, instruction: Gate1 | ControlledGate
) -> Signal:
    if isinstance(instruction, Gate1):
        return chain.apply_gate(signal, instruction.gate, instruction.target)
    return chain.apply_controlled(
        signal, instruction.gate, instruction.control, instruction.target
    )


def run_circuit(
    program: CircuitProgram,
    initial: StateVector | None = None,
    chain: NoisyChain | None = None,
    seed: SeedLike = None,
    order: Sequence[int] | None = None,
) -> CircuitRun:
    """Synthesize the initial state and fold every instruction through the engine.

    Args:
        program: Parsed circuit
        initial: Starting state; the program's own (or |0...0>) when None
        chain: Signal pipeline; ideal tonal when None
        seed: Source of comparator draws for measurement instructions
        order: Qubit order used by ``measure_all``
    """
    chain = chain or NoisyChain(NoiseConfig())
    rng = as_generator(seed)
    model = chain.noise.filter_model
    signal = chain.prepare(_initial(program, initial))
    measurements = []
    for instruction in program.instructions:
        match instruction:
            case Gate1() | ControlledGate():
                signal = _apply(chain, signal, instruction)
            case Measure(qubit):
                u = float(rng.random())
                outcome = measure_qubit(signal, qubit, u, model)
                signal = outcome.collapsed
                shot = MeasurementShot(
                    (qubit,), (outcome.bit,), (u,), (outcome.probability_zero,)
                )
                measurements.append(shot)
            case MeasureAll():
                tree = MeasurementTree(signal, order, model)
                shot = tree.shot(rng.random(program.num_qubits))
                signal = tree.final_signal(shot)
                measurements.append(shot)
    logger.debug(
        f"Ran {len(program.instructions)} instructions, {len(measurements)} measured"
    )
    return CircuitRun(signal, tuple(measurements))


def run_oracle(
    program: CircuitProgram, initial: StateVector | None = None
) -> StateVector:
    """Fold the program's gates through the state-vector reference simulator."""
    state = _initial(program, initial)
    for instruction in program.gates:
        if isinstance(instruction, Gate1):
            state = apply_gate_oracle(state, instruction.gate, instruction.target)
        else:
            state = apply_controlled_oracle(
                state, instruction.gate, instruction.control, instruction.target
            )
    return state


def _strip_final_measurements(program: CircuitProgram) -> CircuitProgram:
    instructions = list(program.instructions)
    while instructions and isinstance(instructions[-1], Measure | MeasureAll):
        instructions.pop()
    return CircuitProgram(program.num_qubits, tuple(instructions), program.initial)


def sample_shots(
    program: CircuitProgram,
    initial: StateVector | None,
    shots: int,
    seed: SeedLike = None,
    chain: NoisyChain | None = None,
    order: Sequence[int] | None = None,
) -> Sampling:
    """Run the program `shots` times and read out the whole register each time.

    Trailing measurement instructions are the readout itself. Without
    mid-circuit measurements and without random noise the gates run once and
    every shot reuses one measurement tree.
    """
    if shots < 1:
        raise DomainError(f"Need at least one shot, got {shots}")
    rng = as_generator(seed)
    chain = chain or NoisyChain(NoiseConfig())
    body = _strip_final_measurements(program)
    model = chain.noise.filter_model
    if not body.has_measurements and chain.noise.is_deterministic:
        final = run_circuit(body, initial, chain).signal
        return sample_signal(final, shots, rng, order, model)
    records = []
    for _ in range(shots):
        final = run_circuit(body, initial, chain, rng).signal
        tree = MeasurementTree(final, order, model)
        records.append(tree.shot(rng.random(program.num_qubits)))
    logger.debug(f"Sampled {shots} independent runs")
    return Sampling(Histogram.from_shots(program.num_qubits, records), records)
