"""Comb filters for subspace projection.

A projection onto qubit i keeps the sub-lattice of harmonics spanned by the
remaining qubits, K = {sum_{j != i} +-h_j}. The ideal filter is a brick wall
over exactly that set. The FIR model approximates it with a windowed-sinc
impulse response so that pass-band ripple and stop-band leakage can be
studied as an error source.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from scipy.signal import get_window

from .errors import ConfigurationError
from .signal import FrequencyLayout, Signal, oversampling_floor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FilterModel:
    """How comb filters are realized.

    Args:
        taps: 0 for ideal brick-wall filters, otherwise the (odd) number of
            FIR taps of a windowed-sinc design
        window: Window name understood by ``scipy.signal.get_window``
    """

    taps: int = 0
    window: str = "hamming"

    def __post_init__(self):
        if self.taps < 0:
            raise ConfigurationError(f"FIR tap count must be >= 0, got {self.taps}")
        if self.taps and self.taps % 2 == 0:
            raise ConfigurationError(f"FIR tap count must be odd, got {self.taps}")

    @property
    def is_ideal(self) -> bool:
        return self.taps == 0


IDEAL = FilterModel()


def sublattice(layout: FrequencyLayout, qubit: int | None = None) -> frozenset[int]:
    """Basis harmonics of the layout with `qubit` removed (all qubits if None)."""
    harmonics = layout.harmonics
    if qubit is not None:
        harmonics = harmonics[:qubit] + harmonics[qubit + 1 :]
    return frozenset(
        sum(s * h for s, h in zip(signs, harmonics, strict=True))
        for signs in product((1, -1), repeat=len(harmonics))
    )


@dataclass(frozen=True)
class CombFilterSpec:
    """A multi-band filter keeping a set of harmonics.

    Args:
        keep_set: Harmonic indices (units of w0) in the pass band
        model: Ideal or FIR realization
        design_samples: DFT grid used to design the FIR taps; defaults to
            twice the oversampling floor of the widest kept harmonic
    """

    keep_set: frozenset[int]
    model: FilterModel = IDEAL
    design_samples: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "keep_set", frozenset(int(k) for k in self.keep_set))

    @cached_property
    def taps(self) -> tuple[np.ndarray, np.ndarray]:
        """FIR tap offsets and weights (zero-phase, centred on offset 0)."""
        size = self._design_size()
        if self.model.taps > size:
            raise ConfigurationError(
                f"{self.model.taps} taps exceed the {size}-point design grid"
            )
        ideal = np.zeros(size)
        for k in self.keep_set:
            ideal[k % size] = 1.0
        impulse = np.fft.ifft(ideal)
        half = self.model.taps // 2
        offsets = np.arange(-half, half + 1)
        weights = impulse[offsets % size] * get_window(
            self.model.window, self.model.taps, fftbins=False
        )
        return offsets, weights

    def _design_size(self) -> int:
        if self.design_samples is not None:
            return self.design_samples
        widest = max((abs(k) for k in self.keep_set), default=0)
        bits = max(int(widest).bit_length(), 1)
        return 2 * oversampling_floor(bits)

    def response(self, frequencies: np.ndarray) -> np.ndarray:
        """Complex gain at each frequency (units of w0)."""
        frequencies = np.asarray(frequencies, dtype=float)
        if self.model.is_ideal:
            return np.isin(frequencies, np.fromiter(self.keep_set, dtype=float)).astype(
                complex
            )
        offsets, weights = self.taps
        size = self._design_size()
        phases = np.exp(-2j * np.pi * np.outer(frequencies, offsets) / size)
        return phases @ weights

    def ripple(self, lattice: frozenset[int] | set[int]) -> tuple[float, float]:
        """(max pass-band gain error, max stop-band gain) over `lattice`."""
        passband = np.array(sorted(lattice & self.keep_set), dtype=float)
        stopband = np.array(sorted(set(lattice) - self.keep_set), dtype=float)
        pass_error = (
            float(np.max(np.abs(self.response(passband) - 1))) if passband.size else 0.0
        )
        stop_gain = 0.0
        if stopband.size:
            stop_gain = float(np.max(np.abs(self.response(stopband))))
        return pass_error, stop_gain


def comb_filter(signal: Signal, spec: CombFilterSpec) -> Signal:
    """Pass the harmonics in spec.keep_set and reject every other one.

    Tonal signals are restricted (ideal) or scaled by the FIR response;
    sampled signals are filtered in the DFT domain with the same response.
    """
    if spec.model.is_ideal:
        return signal.restrict(spec.keep_set)
    return signal.apply_response(spec.response)


def images_disjoint(layout: FrequencyLayout, qubit: int) -> bool:
    """True if neither down/up-shifted image of the keep set overlaps it.

    After multiplying by exp(-+j w_i t) the unwanted branch lands on
    K -+ 2 h_i; a comb over K separates the branches only if these are
    disjoint from K.
    """
    keep = sublattice(layout, qubit)
    shift = 2 * layout.harmonics[qubit]
    down = {k - shift for k in keep}
    up = {k + shift for k in keep}
    return keep.isdisjoint(down) and keep.isdisjoint(up)


def check_filter_disjointness(max_qubits: int = 12) -> list[tuple[int, int]]:
    """Return every (n, qubit) pair up to max_qubits whose images overlap."""
    failures = []
    for n in range(1, max_qubits + 1):
        layout = FrequencyLayout.octave(n)
        for qubit in range(n):
            if not images_disjoint(layout, qubit):
                failures.append((n, qubit))
    logger.debug(f"Filter disjointness checked up to {max_qubits} qubits")
    return failures
