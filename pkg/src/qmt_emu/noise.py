"""Hardware-imperfection models for the analog signal chain.

Noise enters at the stages of the signal chain: the DC voltages holding the
synthesis coefficients and the gate matrix entries, the I/Q rails of the
waveform (gain imbalance, phase skew, additive white noise) and, optionally,
the finite-order comb filters. A NoiseConfig of all zeros leaves every stage
untouched.
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, fields

import numpy as np

from .analysis import DensityMatrix
from .errors import ConfigurationError, DomainError
from .filters import FilterModel
from .oracle import GateU2, StateVector
from .projection import apply_controlled_signal, apply_gate_signal
from .signal import (
    Backend,
    FrequencyLayout,
    SampledSignal,
    Signal,
    demodulate,
    synthesize,
    to_backend,
)
from .utils import SeedLike, as_generator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseConfig:
    """Magnitudes of each hardware error source.

    Args:
        awgn_sigma: Per-sample standard deviation of white noise on each rail
        gain_imbalance: Relative gain error of the Q rail (0 = ideal)
        phase_skew: Quadrature error of the Q rail in radians (0 = ideal)
        coefficient_jitter: Standard deviation of the DC voltage error on each
            real and imaginary synthesis coefficient
        gate_jitter: Same, for the DC voltages holding gate matrix entries
        filter_order: FIR taps of the comb filters (0 = ideal brick wall)
    """

    awgn_sigma: float = 0.0
    gain_imbalance: float = 0.0
    phase_skew: float = 0.0
    coefficient_jitter: float = 0.0
    gate_jitter: float = 0.0
    filter_order: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise ConfigurationError(f"Noise setting {f.name} must be finite")
        for name in ("awgn_sigma", "coefficient_jitter", "gate_jitter"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"Noise setting {name} must be >= 0")
        if self.gain_imbalance <= -1:
            raise ConfigurationError("gain_imbalance must be > -1")
        FilterModel(taps=self.filter_order)

    @classmethod
    def from_mapping(cls, values: Mapping[str, object]) -> "NoiseConfig":
        """Build from a config-file table, rejecting unknown keys."""
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigurationError(f"Unknown noise settings: {sorted(unknown)}")
        try:
            converted = {k: type(getattr(cls, k))(v) for k, v in values.items()}
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Bad noise settings {dict(values)}: {e}") from e
        return cls(**converted)

    @property
    def filter_model(self) -> FilterModel:
        return FilterModel(taps=self.filter_order)

    @property
    def is_ideal(self) -> bool:
        return self == NoiseConfig()

    @property
    def is_deterministic(self) -> bool:
        """True when no setting draws random numbers."""
        return self.awgn_sigma == self.coefficient_jitter == self.gate_jitter == 0

    def with_changes(self, **changes) -> "NoiseConfig":
        return NoiseConfig(**{**asdict(self), **changes})


def add_awgn(
    signal: SampledSignal, sigma: float, seed: SeedLike = None
) -> SampledSignal:
    """Add independent N(0, sigma^2) noise to each rail of each sample."""
    if sigma < 0:
        raise DomainError(f"Noise sigma must be >= 0, got {sigma}")
    if not isinstance(signal, SampledSignal):
        raise ConfigurationError("Additive noise needs the sampled backend")
    if sigma == 0:
        return signal
    rng = as_generator(seed)
    noise = rng.standard_normal(signal.size) + 1j * rng.standard_normal(signal.size)
    return SampledSignal(
        signal.layout,
        signal.samples + sigma * noise,
        signal.samples_per_period,
        signal.periods,
    )


def perturb_coefficients(
    state: StateVector, jitter: float, seed: SeedLike = None
) -> StateVector:
    """Offset every real and imaginary amplitude part by N(0, jitter^2)."""
    if jitter < 0:
        raise DomainError(f"Jitter must be >= 0, got {jitter}")
    if jitter == 0:
        return state
    rng = as_generator(seed)
    d = state.dimension
    offset = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return StateVector(state.amplitudes + jitter * offset)


def perturb_gate(gate: GateU2, jitter: float, seed: SeedLike = None) -> GateU2:
    """Gate whose four entries carry N(0, jitter^2) voltage errors.

    The result is generally not unitary and skips the unitarity check.
    """
    if jitter < 0:
        raise DomainError(f"Jitter must be >= 0, got {jitter}")
    if jitter == 0:
        return gate
    rng = as_generator(seed)
    offset = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return GateU2(gate.matrix + jitter * offset, tolerance=math.inf, name=gate.name)


def iq_coefficients(
    gain_imbalance: float, phase_skew: float
) -> tuple[complex, complex]:
    """(mu, nu) with impaired signal mu * s + nu * conj(s).

    The Q rail is received as (1 + gain_imbalance) times a copy rotated by
    phase_skew towards the I rail.
    """
    g = 1 + gain_imbalance
    rotated = g * complex(math.cos(phase_skew), -math.sin(phase_skew))
    mu = 0.5 + rotated / 2
    nu = 0.5 - g * math.cos(phase_skew) / 2 - 1j * g * math.sin(phase_skew) / 2
    return mu, nu


def apply_iq_imbalance(
    signal: Signal, gain_imbalance: float, phase_skew: float
) -> Signal:
    """Apply rail gain and quadrature errors; conj(s) puts an image at -k."""
    if gain_imbalance == 0 and phase_skew == 0:
        return signal
    mu, nu = iq_coefficients(gain_imbalance, phase_skew)
    return signal * mu + signal.conjugate() * nu


@dataclass
class NoisyChain:
    """The signal pipeline with every configured impairment switched in.

    Args:
        noise: Error magnitudes
        backend: Signal representation; additive noise needs ``sampled``
        samples_per_period: Sampled backend grid (oversampling floor if None)
        periods: Integration length in fundamental periods
        rng: Source of every noise draw
    """

    noise: NoiseConfig
    backend: Backend = Backend.TONAL
    samples_per_period: int | None = None
    periods: int = 1
    rng: np.random.Generator | None = None

    def __post_init__(self):
        self.backend = Backend(self.backend)
        if self.noise.awgn_sigma > 0 and self.backend is Backend.TONAL:
            raise ConfigurationError("Additive noise needs the sampled backend")
        self.rng = as_generator(self.rng)

    def impair(self, signal: Signal) -> Signal:
        """Rail impairments applied after each analog stage."""
        signal = apply_iq_imbalance(
            signal, self.noise.gain_imbalance, self.noise.phase_skew
        )
        if self.noise.awgn_sigma > 0:
            signal = add_awgn(signal, self.noise.awgn_sigma, self.rng)
        return signal

    def prepare(
        self, state: StateVector, layout: FrequencyLayout | None = None
    ) -> Signal:
        """Synthesize a state with jittered coefficient voltages."""
        state = perturb_coefficients(state, self.noise.coefficient_jitter, self.rng)
        signal = to_backend(
            synthesize(state, layout),
            self.backend,
            self.samples_per_period,
            self.periods,
        )
        return self.impair(signal)

    def apply_gate(self, signal: Signal, gate: GateU2, qubit: int) -> Signal:
        gate = perturb_gate(gate, self.noise.gate_jitter, self.rng)
        return self.impair(
            apply_gate_signal(signal, gate, qubit, self.noise.filter_model)
        )

    def apply_controlled(
        self, signal: Signal, gate: GateU2, control: int, target: int
    ) -> Signal:
        gate = perturb_gate(gate, self.noise.gate_jitter, self.rng)
        return self.impair(
            apply_controlled_signal(
                signal, gate, control, target, self.noise.filter_model
            )
        )

    def readout(self, signal: Signal) -> StateVector:
        return demodulate(signal)


def input_states(num_qubits: int) -> list[StateVector]:
    """Product input states |0...0>, |1...1>, |+...+> and |+i...+i>."""
    single = [
        np.array([1, 0], dtype=complex),
        np.array([0, 1], dtype=complex),
        np.array([1, 1], dtype=complex) / math.sqrt(2),
        np.array([1, 1j], dtype=complex) / math.sqrt(2),
    ]
    inputs = []
    for vector in single:
        full = np.ones(1, dtype=complex)
        for _ in range(num_qubits):
            full = np.kron(full, vector)
        inputs.append(StateVector(full))
    return inputs


@dataclass(frozen=True, eq=False)
class ChannelEstimate:
    """Best-fit depolarizing description of a noisy pipeline.

    Args:
        depolarizing: lambda in rho -> lambda rho + (1 - lambda) I/d
        residual: Frobenius norm of what the fitted channel leaves unexplained
        per_input: lambda fitted on each input state alone
        outputs: Monte-Carlo mean output density matrix of each input
    """

    depolarizing: float
    residual: float
    per_input: tuple[float, ...]
    outputs: tuple[DensityMatrix, ...]


def _depolarizing_fit(pairs: Sequence[tuple[np.ndarray, np.ndarray]]) -> float:
    numerator = sum(np.vdot(a, b).real for a, b in pairs)
    denominator = sum(np.vdot(a, a).real for a, _ in pairs)
    return float(numerator / denominator)


def effective_channel(
    noise: NoiseConfig,
    num_qubits: int,
    trials: int,
    seed: SeedLike = None,
    backend: Backend | str = Backend.SAMPLED,
    inputs: Sequence[StateVector] | None = None,
) -> ChannelEstimate:
    """Fit a depolarizing channel to the noisy synthesis/readout pipeline."""
    if trials < 1:
        raise DomainError(f"Need at least one trial, got {trials}")
    inputs = list(inputs) if inputs is not None else input_states(num_qubits)
    chain = NoisyChain(noise, backend, rng=as_generator(seed))
    dim = 2**num_qubits
    mixed = np.eye(dim) / dim
    pairs = []
    outputs = []
    for state in inputs:
        rho_in = DensityMatrix.from_state(state.normalized()).matrix
        mean = np.zeros((dim, dim), dtype=complex)
        for _ in range(trials):
            out = chain.readout(chain.prepare(state)).normalized().amplitudes
            mean += np.outer(out, out.conj())
        mean /= trials
        outputs.append(DensityMatrix(mean))
        pairs.append((rho_in - mixed, mean - mixed))
    depolarizing = _depolarizing_fit(pairs)
    residual = math.sqrt(
        sum(np.linalg.norm(b - depolarizing * a) ** 2 for a, b in pairs)
    )
    per_input = tuple(_depolarizing_fit([pair]) for pair in pairs)
    logger.info(f"Depolarizing fit lambda={depolarizing:.6g}, residual={residual:.3g}")
    return ChannelEstimate(depolarizing, float(residual), per_input, tuple(outputs))
