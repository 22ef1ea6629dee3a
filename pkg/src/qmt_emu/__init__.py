"""Classical analog emulation of quantum computation.

A register of n qubits is carried by one complex signal whose tones sit at
the 2**n basis frequencies; gates, measurement and tomography operate on that
signal and are checked against a state-vector reference.
"""

from importlib.metadata import PackageNotFoundError, version

from .analysis import DensityMatrix, fidelity_mixed, fidelity_pure
from .circuit import CircuitRun, run_circuit, run_oracle, sample_shots
from .errors import (
    CircuitParseError,
    ConfigurationError,
    DegenerateStateError,
    DomainError,
    EmulatorError,
    RejectedGateError,
)
from .measurement import Histogram, measure_all, measure_qubit
from .noise import NoiseConfig, NoisyChain
from .oracle import GateU2, StateVector, apply_gate_oracle
from .parser import CircuitProgram, parse_program
from .projection import apply_controlled_signal, apply_gate_signal
from .signal import Backend, FrequencyLayout, demodulate, synthesize
from .tomography import TomoDataset, collect_tomo_data, qst_mle

try:
    __version__ = version("qmt-emulator")
except PackageNotFoundError:
    # Package is not installed, use fallback version
    __version__ = "UNKNOWN"

__all__ = [
    "Backend",
    "CircuitParseError",
    "CircuitProgram",
    "CircuitRun",
    "ConfigurationError",
    "DegenerateStateError",
    "DensityMatrix",
    "DomainError",
    "EmulatorError",
    "FrequencyLayout",
    "GateU2",
    "Histogram",
    "NoiseConfig",
    "NoisyChain",
    "RejectedGateError",
    "StateVector",
    "TomoDataset",
    "apply_controlled_signal",
    "apply_gate_oracle",
    "apply_gate_signal",
    "collect_tomo_data",
    "demodulate",
    "fidelity_mixed",
    "fidelity_pure",
    "measure_all",
    "measure_qubit",
    "parse_program",
    "qst_mle",
    "run_circuit",
    "run_oracle",
    "sample_shots",
    "synthesize",
]
