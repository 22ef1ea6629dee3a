"""Two-qubit state tomography on the emulated hardware.

Data come from the nine local measurement settings {X, Y, Z} x {X, Y, Z}.
Each setting rotates both qubits into the requested basis with analog gates
and runs the measurement chain, so the counts carry whatever errors the
source's signal pipeline has. Settings are labelled qubit 1 first, matching
bitstrings.

The 16 Hilbert-Schmidt expectations (identity factors included) follow from
the nine settings. Linear inversion gives a starting point, and maximum
likelihood over rho = T^dagger T / Tr(T^dagger T), T lower triangular, gives
the final estimate.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cache
from itertools import product
from typing import Protocol

import numpy as np
from scipy.optimize import minimize

from .analysis import DensityMatrix, dress
from .errors import DomainError
from .filters import IDEAL, FilterModel
from .gates import HADAMARD, PHASE_S_DAGGER
from .measurement import sample_signal
from .noise import NoisyChain
from .oracle import GateU2, StateVector, basis_state
from .projection import apply_gate_signal
from .signal import Backend, Signal, synthesize, to_backend
from .utils import SeedLike, as_generator

logger = logging.getLogger(__name__)

TOMOGRAPHY_QUBITS = 2
PAULI_LABELS = "IXYZ"
PAULI_MATRICES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
SETTINGS: tuple[str, ...] = tuple(a + b for a, b in product("XYZ", repeat=2))

# gates applied, in order, before a Z measurement to measure each Pauli
BASIS_ROTATIONS: dict[str, tuple[GateU2, ...]] = {
    "X": (HADAMARD,),
    "Y": (PHASE_S_DAGGER, HADAMARD),
    "Z": (),
}

DEFAULT_SHOTS_PER_SETTING = 1000
# relative change of the objective at which L-BFGS-B stops
MLE_TOLERANCE = 1e-10
# weight of I/d mixed into the start so every outcome has p > 0
MLE_START_MIXING = 1e-3
MLE_MAX_ITERATIONS = 10_000
MIN_PROBABILITY = 1e-300
CHOLESKY_REGULARIZATION = 1e-9


def pauli_hs_basis(num_qubits: int = TOMOGRAPHY_QUBITS) -> list[np.ndarray]:
    """The 16 matrices sigma_a (x) sigma_b / 2, ordered II, IX, ..., ZZ."""
    _check_two_qubits(num_qubits)
    return [matrix for _, matrix in _labelled_basis()]


@cache
def _labelled_basis() -> tuple[tuple[str, np.ndarray], ...]:
    return tuple(
        (a + b, np.kron(PAULI_MATRICES[a], PAULI_MATRICES[b]) / 2)
        for a, b in product(PAULI_LABELS, repeat=2)
    )


def _check_two_qubits(num_qubits: int) -> None:
    if num_qubits != TOMOGRAPHY_QUBITS:
        raise DomainError(
            f"Tomography supports {TOMOGRAPHY_QUBITS} qubits, got {num_qubits}"
        )


def _rotation_matrix(setting: str) -> np.ndarray:
    """Full 4x4 basis change R of a setting (qubit 1 is the first factor)."""
    factors = []
    for basis in setting:
        matrix = np.eye(2, dtype=complex)
        for gate in BASIS_ROTATIONS[basis]:
            matrix = gate.matrix @ matrix
        factors.append(matrix)
    return np.kron(*factors)


@cache
def setting_projectors(setting: str) -> tuple[np.ndarray, ...]:
    """R^dagger |x><x| R for the four outcomes x of a setting."""
    if setting not in SETTINGS:
        raise DomainError(f"Unknown tomography setting {setting!r}")
    rotation = _rotation_matrix(setting)
    projectors = []
    for x in range(4):
        row = rotation[x]
        projectors.append(np.outer(row.conj(), row))
    return tuple(projectors)


@dataclass(frozen=True, eq=False)
class TomoDataset:
    """Outcome counts per measurement setting.

    Args:
        counts: Setting label -> four outcome counts, indexed by x. Counts may
            be fractional (expected counts of an exact dataset).
    """

    counts: Mapping[str, np.ndarray]
    num_qubits: int = field(default=TOMOGRAPHY_QUBITS)

    def __post_init__(self):
        _check_two_qubits(self.num_qubits)
        counts = {}
        for setting, values in self.counts.items():
            if setting not in SETTINGS:
                raise DomainError(f"Unknown tomography setting {setting!r}")
            values = np.asarray(values, dtype=float)
            if values.shape != (4,) or np.any(values < 0):
                raise DomainError(f"Setting {setting} needs four non-negative counts")
            counts[setting] = values
        object.__setattr__(self, "counts", counts)

    @property
    def is_complete(self) -> bool:
        return all(
            setting in self.counts and self.counts[setting].sum() > 0
            for setting in SETTINGS
        )

    def check_complete(self) -> None:
        missing = [
            s for s in SETTINGS if s not in self.counts or not self.counts[s].sum()
        ]
        if missing:
            raise DomainError(f"Tomography dataset lacks settings {missing}")

    def shots(self, setting: str) -> float:
        return float(self.counts[setting].sum())

    def rows(self) -> Iterator[tuple[str, str, float]]:
        """(setting, outcome bitstring, count) in setting order."""
        for setting in SETTINGS:
            if setting in self.counts:
                for x, count in enumerate(self.counts[setting]):
                    yield setting, format(x, "02b"), float(count)

    def expectations(self) -> dict[str, float]:
        """Empirical expectation of all 16 Pauli products.

        A product is estimated from every setting that measures its
        non-identity factors, weighted by the shots of those settings.
        """
        self.check_complete()
        values = {"II": 1.0}
        for a, b in product(PAULI_LABELS, repeat=2):
            if a == b == "I":
                continue
            total = 0.0
            shots = 0.0
            for setting in SETTINGS:
                if (a != "I" and setting[0] != a) or (b != "I" and setting[1] != b):
                    continue
                counts = self.counts[setting]
                for x, count in enumerate(counts):
                    parity = (a != "I") * (x >> 1) + (b != "I") * (x & 1)
                    total += count * (-1) ** parity
                shots += counts.sum()
            values[a + b] = total / shots
        return values


class StateSource(ABC):
    """Produces the signals measured during tomography.

    The default signal path is the ideal synthesis and gate chain on the
    configured backend.
    """

    num_qubits: int
    backend: Backend = Backend.TONAL
    samples_per_period: int | None = None
    periods: int = 1
    filter_model: FilterModel = IDEAL

    @abstractmethod
    def batches(
        self, shots: int, rng: np.random.Generator
    ) -> Iterator[tuple[StateVector, int]]:
        """Yield (state, shot count) groups summing to `shots`."""

    @abstractmethod
    def target(self) -> DensityMatrix:
        """The ideal density matrix the source stands for."""

    def prepare(self, state: StateVector) -> Signal:
        return to_backend(
            synthesize(state), self.backend, self.samples_per_period, self.periods
        )

    def rotate(self, signal: Signal, gate: GateU2, qubit: int) -> Signal:
        return apply_gate_signal(signal, gate, qubit, self.filter_model)


@dataclass
class PureSource(StateSource):
    state: StateVector
    backend: Backend = Backend.TONAL
    samples_per_period: int | None = None
    periods: int = 1

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    def batches(self, shots, rng):
        yield self.state, shots

    def target(self) -> DensityMatrix:
        return DensityMatrix.from_state(self.state).normalized()


@dataclass
class DressedSource(StateSource):
    """Each shot measures a freshly dressed and renormalized copy of `state`."""

    state: StateVector
    backend: Backend = Backend.TONAL
    samples_per_period: int | None = None
    periods: int = 1

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    def batches(self, shots, rng):
        for _ in range(shots):
            yield dress(self.state, rng).normalized(), 1

    def target(self) -> DensityMatrix:
        return DensityMatrix.from_state(self.state).normalized()


@dataclass
class MixtureSource(StateSource):
    """Classical mixture: each shot draws one component state."""

    states: Sequence[StateVector]
    weights: Sequence[float]
    backend: Backend = Backend.TONAL
    samples_per_period: int | None = None
    periods: int = 1

    def __post_init__(self):
        if len(self.states) != len(self.weights) or not self.states:
            raise DomainError("Mixture needs one weight per component state")
        weights = np.asarray(self.weights, dtype=float)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise DomainError("Mixture weights must be non-negative with positive sum")
        self.weights = weights / weights.sum()

    @classmethod
    def maximally_mixed(cls, num_qubits: int, **kwargs) -> "MixtureSource":
        dim = 2**num_qubits
        states = [basis_state(x, num_qubits) for x in range(dim)]
        return cls(states, [1.0] * dim, **kwargs)

    @property
    def num_qubits(self) -> int:
        return self.states[0].num_qubits

    def batches(self, shots, rng):
        for state, count in zip(
            self.states, rng.multinomial(shots, self.weights), strict=True
        ):
            if count:
                yield state, int(count)

    def target(self) -> DensityMatrix:
        matrix = sum(
            w * DensityMatrix.from_state(s).normalized().matrix
            for s, w in zip(self.states, self.weights, strict=True)
        )
        return DensityMatrix(matrix)


@dataclass
class NoisySource(StateSource):
    """`state` prepared and rotated by a noisy chain, fresh noise every shot."""

    state: StateVector
    chain: NoisyChain

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    def batches(self, shots, rng):
        for _ in range(shots):
            yield self.state, 1

    def target(self) -> DensityMatrix:
        return DensityMatrix.from_state(self.state).normalized()

    def prepare(self, state: StateVector) -> Signal:
        return self.chain.prepare(state)

    def rotate(self, signal: Signal, gate: GateU2, qubit: int) -> Signal:
        return self.chain.apply_gate(signal, gate, qubit)


class DetectionStrategy(Protocol):
    """Turns a rotated signal into outcome counts."""

    def detect(
        self, signal: Signal, shots: int, rng: np.random.Generator
    ) -> np.ndarray:
        ...


@dataclass(frozen=True)
class BornDetection:
    """RMS power comparator chain with uniform draws."""

    order: tuple[int, ...] | None = None
    filter_model: FilterModel = IDEAL

    def detect(
        self, signal: Signal, shots: int, rng: np.random.Generator
    ) -> np.ndarray:
        sampling = sample_signal(signal, shots, rng, self.order, self.filter_model)
        return sampling.histogram.counts


def rotate_to_setting(source: StateSource, signal: Signal, setting: str) -> Signal:
    for qubit, basis in zip((1, 0), setting, strict=True):
        for gate in BASIS_ROTATIONS[basis]:
            signal = source.rotate(signal, gate, qubit)
    return signal


def collect_tomo_data(
    source: StateSource,
    shots_per_setting: int,
    seed: SeedLike = None,
    detection: DetectionStrategy | None = None,
) -> TomoDataset:
    """Measure the source `shots_per_setting` times in each of the nine settings."""
    _check_two_qubits(source.num_qubits)
    if shots_per_setting < 1:
        raise DomainError(
            f"Need at least one shot per setting, got {shots_per_setting}"
        )
    detection = detection or BornDetection()
    rng = as_generator(seed)
    counts = {}
    for setting in SETTINGS:
        tally = np.zeros(4, dtype=int)
        for state, shots in source.batches(shots_per_setting, rng):
            signal = rotate_to_setting(source, source.prepare(state), setting)
            tally += detection.detect(signal, shots, rng)
        counts[setting] = tally
        logger.debug(f"Setting {setting}: counts {tally.tolist()}")
    return TomoDataset(counts)


def outcome_probabilities(rho: DensityMatrix, setting: str) -> np.ndarray:
    probabilities = np.array(
        [np.trace(p @ rho.matrix).real for p in setting_projectors(setting)]
    )
    return np.clip(probabilities / rho.trace, 0.0, None)


def exact_tomo_data(
    rho: DensityMatrix, shots_per_setting: float = DEFAULT_SHOTS_PER_SETTING
) -> TomoDataset:
    """Expected counts of every setting, the infinite-statistics dataset."""
    _check_two_qubits(rho.num_qubits)
    return TomoDataset(
        {s: outcome_probabilities(rho, s) * shots_per_setting for s in SETTINGS}
    )


def project_to_density(matrix: np.ndarray) -> DensityMatrix:
    """Nearest unit-trace PSD matrix by eigenvalue clipping."""
    hermitian = (matrix + matrix.conj().T) / 2
    values, vectors = np.linalg.eigh(hermitian)
    values = np.clip(values, 0.0, None)
    if values.sum() == 0:
        raise DomainError("Estimate has no positive eigenvalue")
    values /= values.sum()
    return DensityMatrix((vectors * values) @ vectors.conj().T)


def qst_linear_inversion(data: TomoDataset) -> DensityMatrix:
    """rho = sum_k e_k B_k from the empirical expectations, then made physical."""
    expectations = data.expectations()
    matrix = sum(
        expectations[label] * basis / 2 for label, basis in _labelled_basis()
    )
    return project_to_density(matrix)


def _likelihood_terms(data: TomoDataset) -> tuple[np.ndarray, np.ndarray]:
    """Stacked outcome projectors and their counts, zero counts dropped."""
    data.check_complete()
    projectors = []
    counts = []
    for setting in SETTINGS:
        for projector, count in zip(
            setting_projectors(setting), data.counts[setting], strict=True
        ):
            if count > 0:
                projectors.append(projector)
                counts.append(count)
    return np.array(projectors), np.array(counts)


def _log_likelihood(a: np.ndarray, projectors: np.ndarray, counts: np.ndarray) -> float:
    trace = np.trace(a).real
    probabilities = np.einsum("kij,ji->k", projectors, a).real / trace
    return float(counts @ np.log(np.clip(probabilities, MIN_PROBABILITY, None)))


def log_likelihood(rho: DensityMatrix, data: TomoDataset) -> float:
    """Multinomial log-likelihood sum n_x log p_x of the dataset under rho."""
    projectors, counts = _likelihood_terms(data)
    return _log_likelihood(rho.matrix, projectors, counts)


def cholesky_factor(rho: DensityMatrix) -> np.ndarray:
    """Lower-triangular T with T^dagger T proportional to rho (regularized)."""
    dim = rho.dimension
    exchange = np.eye(dim)[::-1]
    regularized = exchange @ rho.matrix @ exchange + (
        CHOLESKY_REGULARIZATION * rho.trace * np.eye(dim)
    )
    lower = np.linalg.cholesky(regularized)
    upper = exchange @ lower @ exchange
    return upper.conj().T


@dataclass(frozen=True, eq=False)
class MleResult:
    rho: DensityMatrix
    log_likelihood: float
    iterations: int
    converged: bool


def _pack(t: np.ndarray) -> np.ndarray:
    """Real parameter vector of a lower-triangular T with a real diagonal."""
    rows, cols = np.tril_indices(t.shape[0])
    strict = rows > cols
    return np.concatenate([t[rows, cols].real, t[rows[strict], cols[strict]].imag])


def _unpack(x: np.ndarray, dim: int) -> np.ndarray:
    rows, cols = np.tril_indices(dim)
    strict = rows > cols
    t = np.zeros((dim, dim), dtype=complex)
    t[rows, cols] = x[: len(rows)]
    t[rows[strict], cols[strict]] += 1j * x[len(rows) :]
    return t


def qst_mle(
    data: TomoDataset,
    init: DensityMatrix | None = None,
    tolerance: float = MLE_TOLERANCE,
    max_iterations: int = MLE_MAX_ITERATIONS,
) -> MleResult:
    """Maximize the likelihood over Cholesky factors with L-BFGS-B.

    The objective is sum_k n_k log Tr(P_k A) - N Tr(A) with A = T^dagger T,
    whose maximum has Tr(A) = 1 and A equal to the multinomial estimate. The
    returned likelihood is never below the start's.
    """
    projectors, counts = _likelihood_terms(data)
    total = counts.sum()
    if init is None:
        init = qst_linear_inversion(data)
    dim = init.dimension
    identity = np.eye(dim)

    def objective(x: np.ndarray) -> tuple[float, np.ndarray]:
        t = _unpack(x, dim)
        a = t.conj().T @ t
        probabilities = np.clip(
            np.einsum("kij,ji->k", projectors, a).real, MIN_PROBABILITY, None
        )
        value = counts @ np.log(probabilities) - total * np.trace(a).real
        m = np.einsum("k,kij->ij", counts / probabilities, projectors)
        m -= total * identity
        return -value, -_pack(2 * t @ m)

    init_value = _log_likelihood(init.matrix, projectors, counts)
    start = DensityMatrix(
        (1 - MLE_START_MIXING) * init.normalized().matrix
        + MLE_START_MIXING * identity / dim
    )
    result = minimize(
        objective,
        _pack(cholesky_factor(start)),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": max_iterations, "ftol": tolerance, "gtol": 1e-9},
    )
    converged = bool(result.success)
    if not converged:
        logger.warning(f"MLE did not converge: {result.message}")
    t = _unpack(result.x, dim)
    a = t.conj().T @ t
    rho = project_to_density(a / np.trace(a).real)
    current = _log_likelihood(rho.matrix, projectors, counts)
    if current < init_value:
        rho, current = init.normalized(), init_value
    logger.info(
        f"MLE finished after {result.nit} iterations, log-likelihood {current:.9g}"
    )
    return MleResult(rho, current, int(result.nit), converged)


def purity(rho: DensityMatrix) -> float:
    normalized = rho.normalized().matrix
    return float(np.trace(normalized @ normalized).real)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) |a - b|_1 of the trace-normalized matrices."""
    difference = a.normalized().matrix - b.normalized().matrix
    values = np.linalg.eigvalsh((difference + difference.conj().T) / 2)
    return float(np.abs(values).sum() / 2)
