"""Fidelity ensembles of the noisy hardware and jitter calibration."""

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from scipy.optimize import brentq

from .analysis import fidelity_pure, haar_unitary
from .errors import DomainError
from .noise import NoiseConfig, NoisyChain
from .oracle import GateU2, StateVector, apply_gate_oracle
from .signal import Backend
from .utils import SeedLike, as_generator, named_stream

logger = logging.getLogger(__name__)

SINGLET = StateVector(np.array([0, 1, -1, 0]) / math.sqrt(2))

# Coefficient jitter giving a mean singlet synthesis fidelity of about 0.991
# (1 - F is close to 3 jitter^2 for four amplitudes).
SINGLET_SYNTHESIS_JITTER = 0.055
# Gate-entry jitter that, on top of the synthesis jitter, brings the mean
# fidelity of a random single-qubit gate down to about 0.989.
GATE_VOLTAGE_JITTER = 0.0365

DEFAULT_REALIZATIONS = 500


class Ensemble(StrEnum):
    STATE = "state"
    GATE = "gate"


@dataclass(frozen=True)
class FidelityExperiment:
    """A repeated noisy run compared against the ideal result.

    Args:
        ensemble: ``state`` synthesizes and reads back `state`; ``gate`` also
            applies a Haar-random gate to `qubit`
        noise: Hardware errors of every realization
        realizations: Number of independent runs
        state: Prepared state (singlet by default)
        qubit: Gate target for the gate ensemble
        backend: Signal representation
    """

    ensemble: Ensemble = Ensemble.STATE
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    realizations: int = DEFAULT_REALIZATIONS
    state: StateVector = SINGLET
    qubit: int = 1
    backend: Backend = Backend.TONAL

    def __post_init__(self):
        object.__setattr__(self, "ensemble", Ensemble(self.ensemble))
        if self.realizations < 1:
            raise DomainError(f"Need at least one realization, got {self.realizations}")


@dataclass(frozen=True, eq=False)
class FidelityEnsemble:
    fidelities: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def std(self) -> float:
        return float(np.std(self.fidelities))

    def histogram(self, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
        return np.histogram(self.fidelities, bins=bins)


def _streams(seed: SeedLike) -> tuple[np.random.Generator, np.random.Generator]:
    """(noise, gates) generators; an integer seed splits into named streams."""
    if isinstance(seed, int):
        return named_stream(seed, "noise"), named_stream(seed, "gates")
    rng = as_generator(seed)
    return rng, rng


def fidelity_histogram(
    experiment: FidelityExperiment, seed: SeedLike = None
) -> FidelityEnsemble:
    """Run every realization and collect its pure-state fidelity."""
    noise_rng, gate_rng = _streams(seed)
    chain = NoisyChain(experiment.noise, experiment.backend, rng=noise_rng)
    fidelities = np.empty(experiment.realizations)
    for r in range(experiment.realizations):
        signal = chain.prepare(experiment.state)
        expected = experiment.state
        if experiment.ensemble is Ensemble.GATE:
            gate = GateU2(haar_unitary(2, gate_rng), name="haar")
            signal = chain.apply_gate(signal, gate, experiment.qubit)
            expected = apply_gate_oracle(experiment.state, gate, experiment.qubit)
        fidelities[r] = fidelity_pure(chain.readout(signal), expected)
    result = FidelityEnsemble(fidelities)
    logger.info(
        f"{experiment.ensemble} ensemble: mean fidelity {result.mean:.6f} "
        f"over {experiment.realizations} realizations"
    )
    return result


def calibrate_jitter(
    target_mean_fidelity: float,
    state: StateVector = SINGLET,
    realizations: int = DEFAULT_REALIZATIONS,
    seed: SeedLike = 0,
    upper: float = 1.0,
) -> float:
    """Coefficient jitter whose mean synthesis fidelity hits the target.

    One set of standard normal offsets is reused for every trial jitter, so
    the mean fidelity is a smooth function of the jitter for brentq.
    """
    rng = as_generator(seed)
    amplitudes = state.normalized().amplitudes
    d = state.dimension
    offsets = rng.standard_normal((realizations, d)) + 1j * rng.standard_normal(
        (realizations, d)
    )

    def mean_fidelity(jitter: float) -> float:
        perturbed = amplitudes + jitter * offsets
        overlaps = np.abs(perturbed @ amplitudes.conj())
        return float(np.mean(overlaps / np.linalg.norm(perturbed, axis=1)))

    if not mean_fidelity(upper) < target_mean_fidelity < 1:
        raise DomainError(
            f"Target fidelity {target_mean_fidelity} is outside the reachable "
            f"range ({mean_fidelity(upper):.4g}, 1)"
        )
    jitter = brentq(lambda j: mean_fidelity(j) - target_mean_fidelity, 0.0, upper)
    logger.info(
        f"Calibrated coefficient jitter {jitter:.6g} for mean {target_mean_fidelity}"
    )
    return float(jitter)
