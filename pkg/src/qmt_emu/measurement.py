"""Measurement gates: RMS power, Born probabilities, comparator and collapse.

Measuring qubit i projects the signal as for a gate, takes the mean power
q_b of each partial projection and compares a uniform draw u against
p_0 = q_0 / (q_0 + q_1): the outcome is 1 exactly when u > p_0. The
collapse switch then keeps the unnormalized branch phi_b psi_b, and the next
qubit is measured on that signal.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import chisquare

from .errors import DegenerateStateError, DomainError
from .filters import IDEAL, FilterModel
from .projection import PartialProjectionPair, collapse, partial_project
from .signal import Signal, TonalSignal
from .utils import SeedLike, as_generator, bitstring

logger = logging.getLogger(__name__)


def rms_power(signal: Signal) -> float:
    """Mean power (1/T) integral |psi|^2, the squared RMS value."""
    return signal.power()


def rms_sum_trick(signal: Signal) -> float:
    """Mean square of Re psi + Im psi, the single-rail power shortcut.

    Equals rms_power(signal) + Im(sum_k c_k c_{-k}); the two agree only when
    the DC part of psi**2 is real.
    """
    if isinstance(signal, TonalSignal):
        dc_of_square = sum(
            c * signal.coefficient(-k) for k, c in signal.coefficients.items()
        )
        return signal.power() + float(np.imag(dc_of_square))
    rail_sum = signal.samples.real + signal.samples.imag
    return float(np.mean(rail_sum**2))


def _branch_powers(pair: PartialProjectionPair) -> tuple[float, float]:
    return rms_power(pair.psi0), rms_power(pair.psi1)


def _probability_zero(q0: float, q1: float) -> float:
    total = q0 + q1
    if total == 0:
        raise DegenerateStateError("Cannot measure a zero-power signal")
    return q0 / total


def comparator(u: float, q0: float, q1: float) -> int:
    """Outcome bit for draw u given the branch powers.

    An empty branch can never be selected, even for the edge draws u = 0
    and u = 1.
    """
    if q1 == 0:
        return 0
    if q0 == 0:
        if u <= 0:
            logger.warning(f"Draw u={u} would select the empty 0 branch, reading 1")
        return 1
    return int(u > _probability_zero(q0, q1))


def born_probability(
    signal: Signal, qubit: int, model: FilterModel = IDEAL
) -> tuple[float, float]:
    """(p0, p1) for measuring `qubit`, from the partial projection powers."""
    q0, q1 = _branch_powers(partial_project(signal, qubit, model))
    p0 = _probability_zero(q0, q1)
    return p0, 1.0 - p0


class QubitOutcome(NamedTuple):
    bit: int
    collapsed: Signal
    probability_zero: float


def _check_draw(u: float) -> None:
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"Comparator input {u} outside [0, 1]")


def measure_qubit(
    signal: Signal, qubit: int, u: float, model: FilterModel = IDEAL
) -> QubitOutcome:
    """Measure one qubit with comparator draw u and collapse the signal."""
    _check_draw(u)
    pair = partial_project(signal, qubit, model)
    q0, q1 = _branch_powers(pair)
    p0 = _probability_zero(q0, q1)
    bit = comparator(u, q0, q1)
    logger.debug(f"Qubit {qubit}: p0={p0:.6g}, u={u:.6g} -> {bit}")
    return QubitOutcome(bit, collapse(pair, signal, bit), p0)


@dataclass(frozen=True)
class MeasurementShot:
    """One sequential measurement of a register.

    Args:
        order: Qubits in the order they were measured
        bits: Outcome of each step, in measurement order
        u_draws: Comparator input of each step
        probabilities: p0 seen by the comparator at each step
    """

    order: tuple[int, ...]
    bits: tuple[int, ...]
    u_draws: tuple[float, ...]
    probabilities: tuple[float, ...]

    @property
    def outcome(self) -> int:
        """Basis index x of the measured register."""
        pairs = zip(self.order, self.bits, strict=True)
        return sum(bit << qubit for qubit, bit in pairs)

    @property
    def bitstring(self) -> str:
        return bitstring(self.outcome, len(self.order))


def resolve_order(num_qubits: int, order: Sequence[int] | None) -> tuple[int, ...]:
    """Validate a measurement order; ascending qubit index by default."""
    if order is None:
        return tuple(range(num_qubits))
    order = tuple(int(q) for q in order)
    if sorted(order) != list(range(num_qubits)):
        raise DomainError(f"Measurement order {order} is not a permutation of qubits")
    return order


_Node = tuple[PartialProjectionPair, float, float]


class MeasurementTree:
    """Sequential measurement chain of one signal, cached by outcome prefix.

    Every shot on the same signal walks the same tree of partial projections;
    the analog work for each prefix is done once and reused.
    """

    def __init__(
        self,
        signal: Signal,
        order: Sequence[int] | None = None,
        model: FilterModel = IDEAL,
    ):
        self.order = resolve_order(signal.layout.num_qubits, order)
        self.model = model
        self._signals: dict[tuple[int, ...], Signal] = {(): signal}
        self._nodes: dict[tuple[int, ...], _Node] = {}

    def _node(self, prefix: tuple[int, ...]):
        node = self._nodes.get(prefix)
        if node is None:
            qubit = self.order[len(prefix)]
            pair = partial_project(self._signals[prefix], qubit, self.model)
            node = (pair, *_branch_powers(pair))
            self._nodes[prefix] = node
        return node

    def collapsed(self, prefix: tuple[int, ...]) -> Signal:
        """Unnormalized signal after the outcomes in `prefix`."""
        signal = self._signals.get(prefix)
        if signal is None:
            parent = self.collapsed(prefix[:-1])
            pair, _, _ = self._node(prefix[:-1])
            signal = collapse(pair, parent, prefix[-1])
            self._signals[prefix] = signal
        return signal

    def shot(self, u: Sequence[float]) -> MeasurementShot:
        if len(u) != len(self.order):
            raise DomainError(f"Need {len(self.order)} draws, got {len(u)}")
        prefix: tuple[int, ...] = ()
        probabilities = []
        for draw in u:
            _check_draw(draw)
            self.collapsed(prefix)
            _, q0, q1 = self._node(prefix)
            probabilities.append(_probability_zero(q0, q1))
            prefix += (comparator(draw, q0, q1),)
        return MeasurementShot(
            self.order, prefix, tuple(float(d) for d in u), tuple(probabilities)
        )

    def final_signal(self, shot: MeasurementShot) -> Signal:
        return self.collapsed(shot.bits)


def measure_all(
    signal: Signal,
    u: Sequence[float],
    order: Sequence[int] | None = None,
    model: FilterModel = IDEAL,
) -> MeasurementShot:
    """Measure every qubit in turn, threading the collapsed signal."""
    return MeasurementTree(signal, order, model).shot(u)


@dataclass(frozen=True, eq=False)
class Histogram:
    """Outcome counts over the 2**n basis states."""

    num_qubits: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.shape != (2**self.num_qubits,):
            raise DomainError(f"Histogram needs {2**self.num_qubits} bins")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_shots(
        cls, num_qubits: int, shots: Sequence[MeasurementShot]
    ) -> "Histogram":
        outcomes = np.array([shot.outcome for shot in shots], dtype=int)
        return cls(num_qubits, np.bincount(outcomes, minlength=2**num_qubits))

    @property
    def shots(self) -> int:
        return int(self.counts.sum())

    @property
    def frequencies(self) -> np.ndarray:
        return self.counts / self.shots

    def rows(self) -> list[tuple[str, int, float]]:
        """(bitstring, count, frequency) for every outcome."""
        return [
            (bitstring(x, self.num_qubits), int(count), float(freq))
            for x, (count, freq) in enumerate(
                zip(self.counts, self.frequencies, strict=True)
            )
        ]

    def chi_square_pvalue(self, probabilities: Sequence[float]) -> float:
        """p-value of the counts against expected outcome probabilities.

        Outcomes with zero expected probability must have zero counts;
        otherwise the p-value is 0.
        """
        probabilities = np.asarray(probabilities, dtype=float)
        support = probabilities > 0
        if np.any(self.counts[~support]):
            return 0.0
        if support.sum() < 2:
            return 1.0
        expected = probabilities[support] / probabilities[support].sum() * self.shots
        return float(chisquare(self.counts[support], expected).pvalue)


@dataclass(frozen=True, eq=False)
class Sampling:
    histogram: Histogram
    shots: list[MeasurementShot]


def sample_signal(
    signal: Signal,
    shots: int,
    seed: SeedLike = None,
    order: Sequence[int] | None = None,
    model: FilterModel = IDEAL,
) -> Sampling:
    """Repeat the full-register measurement of one signal `shots` times."""
    if shots < 1:
        raise DomainError(f"Need at least one shot, got {shots}")
    rng = as_generator(seed)
    tree = MeasurementTree(signal, order, model)
    draws = rng.random((shots, len(tree.order)))
    records = [tree.shot(row) for row in draws]
    return Sampling(Histogram.from_shots(signal.layout.num_qubits, records), records)
