"""Quadrature-modulated tonal (QMT) signals.

A quantum state on n qubits is carried by a complex signal built from n
carriers at frequencies w_i = 2**i * w0 (octave spacing). Qubit i in state 0
contributes exp(+j w_i t), in state 1 exp(-j w_i t), and the basis signal of
|x> is the product of its n carrier tones. Every frequency is kept as an exact
integer multiple of w0 ("harmonic index" k), so basis signals, filters and
products never compare floating-point frequencies.

Two interchangeable backends implement the same operations:

- ``TonalSignal``: exact sparse map from harmonic index to complex amplitude.
- ``SampledSignal``: complex samples over whole fundamental periods; the real
  and imaginary parts stand for the in-phase and quadrature voltage rails.
"""

import logging
import math
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from types import MappingProxyType

import numpy as np

from .errors import ConfigurationError, DomainError
from .oracle import StateVector, check_qubit

logger = logging.getLogger(__name__)

DEFAULT_BASE_FREQUENCY = 2 * math.pi * 1000.0  # rad/s

# coefficients smaller than this are dropped when a sampled signal is analyzed
ANALYZE_ATOL = 1e-14

# out-of-band power above this is logged when demodulating
RESIDUAL_WARNING_LEVEL = 1e-9


class Backend(StrEnum):
    TONAL = "tonal"
    SAMPLED = "sampled"


def oversampling_floor(n: int) -> int:
    """Minimum samples per period for an n-qubit octave layout."""
    return 8 * 2**n


@dataclass(frozen=True)
class FrequencyLayout:
    """Assignment of qubits to carrier harmonics of a base frequency.

    Args:
        harmonics: Carrier of each qubit in units of w0, indexed by qubit;
            strictly increasing, each a distinct power of two
        base_frequency: w0 in rad/s

    The octave layout uses harmonics (1, 2, 4, ...). Partial projections live
    on reduced layouts that skip the addressed qubit's harmonic.
    """

    harmonics: tuple[int, ...]
    base_frequency: float = DEFAULT_BASE_FREQUENCY

    def __post_init__(self):
        harmonics = tuple(int(h) for h in self.harmonics)
        object.__setattr__(self, "harmonics", harmonics)
        if not self.base_frequency > 0 or not math.isfinite(self.base_frequency):
            raise ConfigurationError(
                f"Base frequency must be positive, got {self.base_frequency}"
            )
        for h in harmonics:
            if h <= 0 or h & (h - 1):
                raise ConfigurationError(f"Harmonic {h} is not a power of two")
        if any(a >= b for a, b in zip(harmonics, harmonics[1:], strict=False)):
            raise ConfigurationError(f"Harmonics {harmonics} not strictly increasing")

    @classmethod
    def octave(
        cls, num_qubits: int, base_frequency: float = DEFAULT_BASE_FREQUENCY
    ) -> "FrequencyLayout":
        if num_qubits < 1:
            raise DomainError(f"Layout needs at least one qubit, got {num_qubits}")
        return cls(tuple(2**i for i in range(num_qubits)), base_frequency)

    @property
    def num_qubits(self) -> int:
        return len(self.harmonics)

    @property
    def dimension(self) -> int:
        return 2**self.num_qubits

    @property
    def qubit_frequencies(self) -> tuple[float, ...]:
        """Carrier angular frequencies w_i in rad/s."""
        return tuple(h * self.base_frequency for h in self.harmonics)

    @property
    def base_frequency_hz(self) -> float:
        return self.base_frequency / (2 * math.pi)

    @property
    def period(self) -> float:
        """Fundamental period T = 2 pi / w0 in seconds."""
        return 2 * math.pi / self.base_frequency

    @property
    def max_harmonic(self) -> int:
        """Largest |k| of any basis signal."""
        return sum(self.harmonics)

    @property
    def oversampling_floor(self) -> int:
        """Minimum samples per period for signals on this layout."""
        return 16 * self.harmonics[-1] if self.harmonics else 8

    @property
    def sample_quantum(self) -> int:
        """Samples per period must be a multiple of this."""
        return 2 * self.harmonics[-1] if self.harmonics else 1

    def basis_frequency(self, x: int) -> int:
        """Harmonic index of basis signal phi_x."""
        if not 0 <= x < self.dimension:
            raise DomainError(
                f"Basis index {x} out of range for {self.num_qubits} qubits"
            )
        return sum(-h if (x >> i) & 1 else h for i, h in enumerate(self.harmonics))

    @cached_property
    def basis_frequencies(self) -> np.ndarray:
        """Harmonic index of every basis signal, indexed by x."""
        ks = np.array([self.basis_frequency(x) for x in range(self.dimension)])
        ks.setflags(write=False)
        return ks

    @cached_property
    def basis_index(self) -> Mapping[int, int]:
        """Inverse of basis_frequency."""
        index = {int(k): x for x, k in enumerate(self.basis_frequencies)}
        return MappingProxyType(index)

    def without_qubit(self, qubit: int) -> "FrequencyLayout":
        """Reduced layout of a partial projection; later qubits shift down."""
        check_qubit(qubit, self.num_qubits)
        harmonics = self.harmonics[:qubit] + self.harmonics[qubit + 1 :]
        return FrequencyLayout(harmonics, self.base_frequency)

    def merge(self, other: "FrequencyLayout") -> "FrequencyLayout":
        """Layout spanned by both layouts' qubits (product/sum of signals)."""
        check_commensurate(self, other)
        if self.harmonics == other.harmonics:
            return self
        return FrequencyLayout(
            tuple(sorted(set(self.harmonics) | set(other.harmonics))),
            self.base_frequency,
        )


def check_commensurate(a: FrequencyLayout, b: FrequencyLayout) -> None:
    """Raise DomainError unless two layouts share a base frequency."""
    if not math.isclose(a.base_frequency, b.base_frequency, rel_tol=1e-12):
        raise DomainError(
            f"Incommensurate base frequencies {a.base_frequency} and {b.base_frequency}"
        )


def _is_scalar(value) -> bool:
    return isinstance(value, (int, float, complex, np.number))


@dataclass(frozen=True, eq=False)
class TonalSignal:
    """Exact frequency-domain signal: sum_k c_k exp(j k w0 t).

    Args:
        layout: Layout the signal is interpreted against
        coefficients: Map from harmonic index k to complex amplitude; exact
            zeros are dropped
    """

    layout: FrequencyLayout
    coefficients: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        canonical = {
            int(k): complex(c) for k, c in sorted(self.coefficients.items()) if c != 0
        }
        object.__setattr__(self, "coefficients", MappingProxyType(canonical))

    def coefficient(self, k: int) -> complex:
        return self.coefficients.get(k, 0j)

    def value(self, t: float | np.ndarray) -> complex | np.ndarray:
        """Signal value at time(s) t in seconds."""
        t = np.asarray(t, dtype=float)
        w0 = self.layout.base_frequency
        total = np.zeros(t.shape, dtype=complex)
        for k, c in self.coefficients.items():
            total = total + c * np.exp(1j * k * w0 * t)
        return complex(total) if total.ndim == 0 else total

    @property
    def max_frequency(self) -> int:
        """Largest |k| present (0 for the empty signal)."""
        return max((abs(k) for k in self.coefficients), default=0)

    def tone(self, k: int, amplitude: complex = 1.0) -> "TonalSignal":
        """amplitude * exp(j k w0 t) on this signal's layout."""
        return TonalSignal(self.layout, {k: amplitude})

    def with_layout(self, layout: FrequencyLayout) -> "TonalSignal":
        check_commensurate(self.layout, layout)
        return TonalSignal(layout, self.coefficients)

    def multiply(self, other: "TonalSignal") -> "TonalSignal":
        """Product of two signals: convolution of the coefficient maps."""
        _check_same_backend(self, other)
        layout = self.layout.merge(other.layout)
        product: dict[int, complex] = {}
        for ka, ca in self.coefficients.items():
            for kb, cb in other.coefficients.items():
                product[ka + kb] = product.get(ka + kb, 0j) + ca * cb
        return TonalSignal(layout, product)

    def apply_response(self, response) -> "TonalSignal":
        """Scale every coefficient c_k by response(k) (vectorized callable)."""
        if not self.coefficients:
            return self
        ks = np.fromiter(self.coefficients, dtype=float)
        gains = response(ks)
        return TonalSignal(
            self.layout,
            {
                k: c * g
                for (k, c), g in zip(self.coefficients.items(), gains, strict=True)
            },
        )

    def restrict(self, keep: Iterable[int]) -> "TonalSignal":
        keep = set(keep)
        return TonalSignal(
            self.layout, {k: c for k, c in self.coefficients.items() if k in keep}
        )

    def power(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coefficients.values()))

    def inner(self, other: "TonalSignal") -> complex:
        _check_same_backend(self, other)
        check_commensurate(self.layout, other.layout)
        return complex(
            sum(
                c.conjugate() * other.coefficient(k)
                for k, c in self.coefficients.items()
            )
        )

    def conjugate(self) -> "TonalSignal":
        """The signal conj(psi(t)): coefficient conj(c_k) moves to -k."""
        return TonalSignal(
            self.layout, {-k: c.conjugate() for k, c in self.coefficients.items()}
        )

    def __add__(self, other: "TonalSignal") -> "TonalSignal":
        _check_same_backend(self, other)
        layout = self.layout.merge(other.layout)
        total = dict(self.coefficients)
        for k, c in other.coefficients.items():
            total[k] = total.get(k, 0j) + c
        return TonalSignal(layout, total)

    def __neg__(self) -> "TonalSignal":
        return self * -1

    def __sub__(self, other: "TonalSignal") -> "TonalSignal":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "TonalSignal":
        if not _is_scalar(scalar):
            return NotImplemented
        return TonalSignal(
            self.layout, {k: c * scalar for k, c in self.coefficients.items()}
        )

    __rmul__ = __mul__

    def __repr__(self) -> str:
        terms = ", ".join(f"{k:+d}: {c:.6g}" for k, c in self.coefficients.items())
        return f"TonalSignal(harmonics={self.layout.harmonics}, {{{terms}}})"


@dataclass(frozen=True, eq=False)
class SampledSignal:
    """Complex samples over whole fundamental periods.

    Args:
        layout: Layout the signal is interpreted against
        samples: N * periods complex samples at t_m = m T / N
        samples_per_period: N; a multiple of the layout's sample quantum and
            at least its oversampling floor
        periods: Integration length in fundamental periods
    """

    layout: FrequencyLayout
    samples: np.ndarray
    samples_per_period: int
    periods: int = 1

    def __post_init__(self):
        samples = np.array(self.samples, dtype=complex).reshape(-1)
        check_sampling(self.layout, self.samples_per_period, self.periods)
        if samples.size != self.samples_per_period * self.periods:
            raise ConfigurationError(
                f"Expected {self.samples_per_period * self.periods} samples, "
                f"got {samples.size}"
            )
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def size(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        """Sample instants in seconds."""
        return np.arange(self.size) * (self.layout.period / self.samples_per_period)

    @property
    def bin_frequencies(self) -> np.ndarray:
        """Frequency of each DFT bin in units of w0 (fractional when periods > 1)."""
        return signed_bins(self.size) / self.periods

    def spectrum(self) -> np.ndarray:
        """DFT coefficients normalized so a unit tone has a unit bin."""
        return np.fft.fft(self.samples) / self.size

    def coefficient(self, k: int) -> complex:
        return complex(self.spectrum()[(k * self.periods) % self.size])

    def tone(self, k: int, amplitude: complex = 1.0) -> "SampledSignal":
        """amplitude * exp(j k w0 t) sampled like this signal."""
        m = np.arange(self.size)
        samples = amplitude * np.exp(2j * np.pi * k * m / self.samples_per_period)
        return self._like(samples)

    def with_layout(self, layout: FrequencyLayout) -> "SampledSignal":
        check_commensurate(self.layout, layout)
        return SampledSignal(
            layout, self.samples, self.samples_per_period, self.periods
        )

    def multiply(self, other: "SampledSignal") -> "SampledSignal":
        """Pointwise complex product of the two rails."""
        self._check_grid(other)
        return SampledSignal(
            self.layout.merge(other.layout),
            self.samples * other.samples,
            self.samples_per_period,
            self.periods,
        )

    def apply_response(self, response) -> "SampledSignal":
        """Multiply every DFT bin by response(bin frequency)."""
        gains = response(self.bin_frequencies)
        return self._like(np.fft.ifft(np.fft.fft(self.samples) * gains))

    def restrict(self, keep: Iterable[int]) -> "SampledSignal":
        keep = np.fromiter(keep, dtype=float)
        return self.apply_response(lambda f: np.isin(f, keep).astype(float))

    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def inner(self, other: "SampledSignal") -> complex:
        self._check_grid(other)
        return complex(np.vdot(self.samples, other.samples) / self.size)

    def conjugate(self) -> "SampledSignal":
        return self._like(np.conj(self.samples))

    def _like(self, samples: np.ndarray) -> "SampledSignal":
        return SampledSignal(
            self.layout, samples, self.samples_per_period, self.periods
        )

    def _check_grid(self, other: "SampledSignal") -> None:
        _check_same_backend(self, other)
        check_commensurate(self.layout, other.layout)
        if (self.samples_per_period, self.periods) != (
            other.samples_per_period,
            other.periods,
        ):
            raise DomainError(
                f"Sampling grids differ: {self.samples_per_period}x{self.periods} vs "
                f"{other.samples_per_period}x{other.periods}"
            )

    def __add__(self, other: "SampledSignal") -> "SampledSignal":
        self._check_grid(other)
        return SampledSignal(
            self.layout.merge(other.layout),
            self.samples + other.samples,
            self.samples_per_period,
            self.periods,
        )

    def __neg__(self) -> "SampledSignal":
        return self * -1

    def __sub__(self, other: "SampledSignal") -> "SampledSignal":
        return self + (-other)

    def __mul__(self, scalar: complex) -> "SampledSignal":
        if not _is_scalar(scalar):
            return NotImplemented
        return self._like(self.samples * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return (
            f"SampledSignal(harmonics={self.layout.harmonics}, "
            f"N={self.samples_per_period}, periods={self.periods})"
        )


Signal = TonalSignal | SampledSignal


def _check_same_backend(a: Signal, b: Signal) -> None:
    if type(a) is not type(b):
        raise DomainError(
            f"Cannot combine {type(a).__name__} with {type(b).__name__}"
        )


def check_sampling(layout: FrequencyLayout, samples_per_period: int, periods: int = 1):
    """Raise ConfigurationError if a sampling grid cannot carry the layout."""
    if periods < 1:
        raise ConfigurationError(
            f"Integration length must be >= 1 period, got {periods}"
        )
    if samples_per_period < layout.oversampling_floor:
        raise ConfigurationError(
            f"{samples_per_period} samples per period is below the oversampling "
            f"floor {layout.oversampling_floor} for harmonics {layout.harmonics}"
        )
    if samples_per_period % layout.sample_quantum:
        raise ConfigurationError(
            f"{samples_per_period} samples per period is not a multiple of "
            f"{layout.sample_quantum}"
        )


def basis_frequency(x: int, layout: FrequencyLayout) -> int:
    """Harmonic index of basis signal phi_x (bit 0 -> +w_i, bit 1 -> -w_i)."""
    return layout.basis_frequency(x)


def basis_signal(x: int, layout: FrequencyLayout) -> TonalSignal:
    return TonalSignal(layout, {layout.basis_frequency(x): 1.0})


def synthesize(
    state: StateVector, layout: FrequencyLayout | None = None
) -> TonalSignal:
    """Signal sum_x alpha_x phi_x of a state (octave layout by default)."""
    if layout is None:
        layout = FrequencyLayout.octave(state.num_qubits)
    if state.dimension != layout.dimension:
        raise DomainError(
            f"State has {state.num_qubits} qubits, layout has {layout.num_qubits}"
        )
    return TonalSignal(
        layout,
        dict(zip(layout.basis_frequencies.tolist(), state.amplitudes, strict=True)),
    )


def render(
    signal: TonalSignal, samples_per_period: int | None = None, periods: int = 1
) -> SampledSignal:
    """Sample a tonal signal over `periods` fundamental periods.

    Raises:
        ConfigurationError: If the grid would alias a frequency present
    """
    layout = signal.layout
    if samples_per_period is None:
        samples_per_period = layout.oversampling_floor
    check_sampling(layout, samples_per_period, periods)
    if 2 * signal.max_frequency >= samples_per_period:
        raise ConfigurationError(
            f"Frequency {signal.max_frequency} w0 aliases at {samples_per_period} "
            f"samples per period"
        )
    size = samples_per_period * periods
    bins = np.zeros(size, dtype=complex)
    for k, c in signal.coefficients.items():
        bins[(k * periods) % size] += c
    return SampledSignal(layout, np.fft.ifft(bins) * size, samples_per_period, periods)


def analyze(signal: SampledSignal, atol: float = ANALYZE_ATOL) -> TonalSignal:
    """Integer-harmonic content of a sampled signal (inverse of render)."""
    spectrum = signal.spectrum()
    frequencies = signal.bin_frequencies
    coefficients = {}
    for index in np.flatnonzero(np.abs(spectrum) > atol):
        f = frequencies[index]
        if f == round(f):
            coefficients[int(round(f))] = complex(spectrum[index])
    return TonalSignal(signal.layout, coefficients)


def to_backend(
    signal: Signal,
    backend: Backend | str,
    samples_per_period: int | None = None,
    periods: int = 1,
) -> Signal:
    """Convert a signal to the requested backend."""
    backend = Backend(backend)
    if backend is Backend.TONAL:
        return signal if isinstance(signal, TonalSignal) else analyze(signal)
    if isinstance(signal, SampledSignal):
        return signal
    return render(signal, samples_per_period, periods)


def inner_product(a: Signal, b: Signal) -> complex:
    """<a|b> = (1/T) integral conj(a) b over the integration window."""
    return a.inner(b)


def multiply(a: Signal, b: Signal) -> Signal:
    """Product of two signals; qubits on distinct carriers form a tensor product."""
    return a.multiply(b)


@dataclass(frozen=True, eq=False)
class Demodulation:
    """Demodulated state plus the signal power found outside the basis band."""

    state: StateVector
    residual_power: float


def demodulate_report(
    signal: Signal, layout: FrequencyLayout | None = None
) -> Demodulation:
    """Recover amplitudes alpha_x = <phi_x|signal> and the out-of-band power."""
    layout = layout or signal.layout
    check_commensurate(layout, signal.layout)
    if isinstance(signal, TonalSignal):
        amplitudes = [signal.coefficient(int(k)) for k in layout.basis_frequencies]
    else:
        spectrum = signal.spectrum()
        bins = (layout.basis_frequencies * signal.periods) % signal.size
        amplitudes = spectrum[bins]
    state = StateVector(amplitudes)
    residual = max(signal.power() - state.squared_norm, 0.0)
    if residual > RESIDUAL_WARNING_LEVEL:
        logger.debug(f"Out-of-band power {residual:.3g} left out of demodulation")
    return Demodulation(state, residual)


def demodulate(signal: Signal, layout: FrequencyLayout | None = None) -> StateVector:
    """Recover the state vector carried by a signal."""
    return demodulate_report(signal, layout).state


def signed_bins(size: int) -> np.ndarray:
    """DFT bin indices in [-size/2, size/2) as exact integers."""
    bins = np.arange(size)
    bins[bins >= (size + 1) // 2] -= size
    return bins
