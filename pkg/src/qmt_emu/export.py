"""CSV and text writers for run artifacts.

Every writer creates parent directories, writes with "\\n" line endings and
12 significant digits, and logs the created path, so a seeded run produces
byte-identical files.
"""

import csv
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .analysis import DensityMatrix
from .experiments import FidelityEnsemble
from .measurement import Histogram, MeasurementShot
from .oracle import StateVector
from .signal import SampledSignal, Signal, TonalSignal, render
from .tomography import TomoDataset
from .utils import bitstring, format_complex, format_float

logger = logging.getLogger(__name__)


def write_csv(
    path: Path | str, header: Sequence[str], rows: Iterable[Sequence]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"Created {path}")
    return path


def write_state(path: Path | str, state: StateVector) -> Path:
    """basis,re,im,probability for each amplitude."""
    probabilities = (
        state.probabilities() if state.squared_norm else np.zeros(state.dimension)
    )
    rows = (
        (
            bitstring(x, state.num_qubits),
            format_float(a.real),
            format_float(a.imag),
            format_float(p),
        )
        for x, (a, p) in enumerate(zip(state.amplitudes, probabilities, strict=True))
    )
    return write_csv(path, ("basis", "re", "im", "probability"), rows)


def write_spectrum(path: Path | str, signal: Signal) -> Path:
    """Nonzero harmonic lines: k, freq_hz, re, im, magnitude."""
    if isinstance(signal, SampledSignal):
        spectrum = signal.spectrum()
        lines = {
            int(f): complex(c)
            for f, c in zip(signal.bin_frequencies, spectrum, strict=True)
            if f == int(f) and abs(c) > 1e-12
        }
    else:
        lines = dict(signal.coefficients)
    f0 = signal.layout.base_frequency_hz
    rows = (
        (
            k,
            format_float(k * f0),
            format_float(c.real),
            format_float(c.imag),
            format_float(abs(c)),
        )
        for k, c in sorted(lines.items())
    )
    return write_csv(path, ("k", "freq_hz", "re", "im", "magnitude"), rows)


def write_signal(path: Path | str, signal: Signal) -> Path:
    """Time-domain samples: time_s, re, im (tonal signals are rendered first)."""
    if isinstance(signal, TonalSignal):
        signal = render(signal)
    rows = (
        (format_float(t), format_float(s.real), format_float(s.imag))
        for t, s in zip(signal.times, signal.samples, strict=True)
    )
    return write_csv(path, ("time_s", "re", "im"), rows)


def write_histogram(path: Path | str, histogram: Histogram) -> Path:
    rows = ((label, n, format_float(freq)) for label, n, freq in histogram.rows())
    return write_csv(path, ("outcome", "count", "frequency"), rows)


def write_shot_log(path: Path | str, shots: Sequence[MeasurementShot]) -> Path:
    """One row per shot: bits, u draws and step probabilities in measurement order."""
    rows = (
        (
            i,
            shot.bitstring,
            " ".join(str(q) for q in shot.order),
            " ".join(format_float(u) for u in shot.u_draws),
            " ".join(format_float(p) for p in shot.probabilities),
        )
        for i, shot in enumerate(shots)
    )
    return write_csv(path, ("shot", "bits", "order", "u_draws", "p0"), rows)


def write_fidelities(path: Path | str, ensemble: FidelityEnsemble) -> Path:
    rows = ((i, format_float(f)) for i, f in enumerate(ensemble.fidelities))
    return write_csv(path, ("realization", "fidelity"), rows)


def write_tomo_dataset(path: Path | str, data: TomoDataset) -> Path:
    rows = ((s, x, format_float(n)) for s, x, n in data.rows())
    return write_csv(path, ("setting", "outcome", "count"), rows)


def write_density_matrix(path: Path | str, rho: DensityMatrix) -> Path:
    """Row-major complex text matrix, tab-separated `re+imj` cells."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ("\t".join(format_complex(complex(v)) for v in row) for row in rho.matrix)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"Created {path}")
    return path


def write_report(path: Path | str, values: dict[str, object]) -> Path:
    """Two-column key,value summary."""
    rows = (
        (key, format_float(v) if isinstance(v, float) else v)
        for key, v in values.items()
    )
    return write_csv(path, ("key", "value"), rows)
