"""Utility functions for the emulator: random streams and number formatting."""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

# Named random streams fanned out from one run seed. Order is part of the
# determinism contract: appending is fine, reordering changes every run.
STREAM_NAMES = ("shots", "noise", "dressing", "gates", "tomography")

SIGNIFICANT_DIGITS = 12

SeedLike = int | np.random.Generator | None


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Return a Generator for a seed, passing existing generators through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def named_stream(seed: int, name: str) -> np.random.Generator:
    """Return the independent random stream `name` derived from `seed`."""
    try:
        index = STREAM_NAMES.index(name)
    except ValueError:
        raise KeyError(f"Unknown random stream {name!r}") from None
    logger.debug(f"Spawning stream {name!r} (key {index}) from seed {seed}")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def format_float(value: float) -> str:
    """Format a float with the fixed number of significant digits used in CSV."""
    text = f"{value:.{SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def format_complex(value: complex) -> str:
    """Format a complex number as an `re+imj` cell."""
    imag = f"{value.imag:+.{SIGNIFICANT_DIGITS}g}"
    if imag == "-0":
        imag = "+0"
    return f"{format_float(value.real)}{imag}j"


def format_complex_exact(value: complex) -> str:
    """Format a complex number so that `complex()` reads back the same value."""
    sign = "-" if math.copysign(1.0, value.imag) < 0 else "+"
    return f"{value.real!r}{sign}{abs(value.imag)!r}j"


def bitstring(x: int, num_qubits: int) -> str:
    """Register label of basis index x, most significant qubit first."""
    if num_qubits == 0:
        return ""
    return format(x, f"0{num_qubits}b")
