"""Tests for the RMS power, Born probability and collapse chain."""

import math

import numpy as np
import pytest

from qmt_emu.errors import DegenerateStateError, DomainError
from qmt_emu.measurement import (
    Histogram,
    MeasurementShot,
    MeasurementTree,
    born_probability,
    comparator,
    measure_all,
    measure_qubit,
    resolve_order,
    rms_power,
    rms_sum_trick,
    sample_signal,
)
from qmt_emu.oracle import StateVector, subspace_weights
from qmt_emu.signal import (
    FrequencyLayout,
    TonalSignal,
    demodulate,
    render,
    synthesize,
)


def test_rms_power_of_unit_tone():
    signal = TonalSignal(FrequencyLayout.octave(1), {1: 1})
    assert rms_power(signal) == pytest.approx(1.0)
    assert rms_power(render(signal)) == pytest.approx(1.0)
    assert rms_sum_trick(signal) == pytest.approx(1.0)


def test_rms_sum_trick_counterexample():
    # Re + Im of this signal carries twice its power
    signal = TonalSignal(
        FrequencyLayout.octave(1), {1: 1 / math.sqrt(2), -1: 1j / math.sqrt(2)}
    )
    assert rms_power(signal) == pytest.approx(1.0)
    assert rms_sum_trick(signal) == pytest.approx(2.0)
    assert rms_sum_trick(render(signal)) == pytest.approx(2.0)


def test_rms_power_is_squared_norm(example_state):
    signal = synthesize(example_state)
    assert rms_power(signal) == pytest.approx(example_state.squared_norm)
    assert rms_power(render(signal)) == pytest.approx(example_state.squared_norm)


@pytest.mark.parametrize("qubit", [0, 1])
def test_born_probability_matches_subspace_weights(example_state, qubit):
    q0, q1 = subspace_weights(example_state, qubit)
    p0, p1 = born_probability(synthesize(example_state), qubit)
    assert p0 == pytest.approx(q0 / (q0 + q1), abs=1e-12)
    assert p1 == pytest.approx(q1 / (q0 + q1), abs=1e-12)


def test_born_probability_of_singlet(singlet):
    for qubit in (0, 1):
        assert born_probability(synthesize(singlet), qubit) == pytest.approx(
            (0.5, 0.5)
        )


def test_comparator_warns_when_overriding_an_edge_draw(caplog):
    assert comparator(0.0, 0.0, 1.0) == 1
    assert "empty 0 branch" in caplog.text
    caplog.clear()
    assert comparator(0.3, 0.0, 1.0) == 1
    assert comparator(1.0, 1.0, 0.0) == 0
    assert caplog.text == ""


def test_comparator():
    assert comparator(0.2, 1.0, 1.0) == 0
    assert comparator(0.5, 1.0, 1.0) == 0
    assert comparator(0.75, 1.0, 1.0) == 1
    # an empty branch is never picked, even at the edge draws
    assert comparator(1.0, 1.0, 0.0) == 0
    assert comparator(0.0, 0.0, 1.0) == 1


def test_measure_qubit_collapses_singlet(singlet):
    s = 1 / math.sqrt(2)
    signal = synthesize(singlet)

    outcome = measure_qubit(signal, 1, 0.75)
    assert outcome.bit == 1
    assert outcome.probability_zero == pytest.approx(0.5)
    assert demodulate(outcome.collapsed).allclose(StateVector([0, 0, -s, 0]))

    outcome = measure_qubit(signal, 1, 0.2)
    assert outcome.bit == 0
    assert demodulate(outcome.collapsed).allclose(StateVector([0, s, 0, 0]))


def test_measure_qubit_is_idempotent(example_state):
    first = measure_qubit(synthesize(example_state), 0, 0.3)
    for u in (0.0, 0.5, 1.0):
        again = measure_qubit(first.collapsed, 0, u)
        assert again.bit == first.bit
        assert again.probability_zero == float(first.bit == 0)


def test_measure_qubit_rejects_bad_draw(singlet):
    with pytest.raises(DomainError):
        measure_qubit(synthesize(singlet), 0, 1.5)
    with pytest.raises(DomainError):
        measure_qubit(synthesize(singlet), 0, -0.1)


def test_measure_zero_signal():
    with pytest.raises(DegenerateStateError):
        measure_qubit(TonalSignal(FrequencyLayout.octave(2)), 0, 0.5)


def test_measure_all_qubit_a_first(singlet):
    shot = measure_all(synthesize(singlet), [0.2, 0.9], order=(1, 0))
    assert shot.order == (1, 0)
    assert shot.bits == (0, 1)
    assert shot.outcome == 1
    assert shot.bitstring == "01"
    assert shot.probabilities == pytest.approx((0.5, 0.0))


def test_measure_all_default_order_is_ascending(singlet):
    shot = measure_all(synthesize(singlet), [0.9, 0.3])
    assert shot.order == (0, 1)
    assert shot.bits == (1, 0)
    assert shot.bitstring == "01"


def test_measure_all_backends_agree(example_state):
    draws = [0.37, 0.81]
    tonal = measure_all(synthesize(example_state), draws)
    sampled = measure_all(render(synthesize(example_state)), draws)
    assert tonal.bits == sampled.bits
    assert tonal.probabilities == pytest.approx(sampled.probabilities, abs=1e-9)


def test_measurement_tree_final_signal(singlet):
    tree = MeasurementTree(synthesize(singlet), order=(1, 0))
    shot = tree.shot([0.2, 0.9])
    s = 1 / math.sqrt(2)
    assert demodulate(tree.final_signal(shot)).allclose(StateVector([0, s, 0, 0]))
    with pytest.raises(DomainError):
        tree.shot([0.5])


def test_resolve_order():
    assert resolve_order(3, None) == (0, 1, 2)
    assert resolve_order(2, [1, 0]) == (1, 0)
    with pytest.raises(DomainError):
        resolve_order(2, (0, 0))
    with pytest.raises(DomainError):
        resolve_order(2, (0, 1, 2))


def test_histogram_from_shots():
    shots = [
        MeasurementShot((0, 1), (1, 0), (0.9, 0.1), (0.5, 0.5)),
        MeasurementShot((0, 1), (1, 0), (0.8, 0.2), (0.5, 0.5)),
        MeasurementShot((0, 1), (0, 1), (0.1, 0.9), (0.5, 0.5)),
    ]
    histogram = Histogram.from_shots(2, shots)
    assert histogram.counts.tolist() == [0, 2, 1, 0]
    assert histogram.shots == 3
    assert histogram.rows()[1] == ("01", 2, pytest.approx(2 / 3))


def test_bell_sampling(bell):
    sampling = sample_signal(synthesize(bell), 10000, seed=11)
    histogram = sampling.histogram
    assert histogram.counts[1] == histogram.counts[2] == 0
    assert histogram.shots == 10000
    assert histogram.chi_square_pvalue([0.5, 0, 0, 0.5]) > 1e-3


def test_sampling_follows_born_rule():
    rng = np.random.default_rng(4)
    z = rng.normal(size=8) + 1j * rng.normal(size=8)
    state = StateVector(z / np.linalg.norm(z))
    sampling = sample_signal(synthesize(state), 20000, seed=5)
    assert sampling.histogram.chi_square_pvalue(state.probabilities()) > 1e-3


@pytest.mark.parametrize("order", [(2, 0, 1), (1, 2, 0), (2, 1, 0)])
def test_joint_distribution_does_not_depend_on_order(order):
    rng = np.random.default_rng(8)
    z = rng.normal(size=8) + 1j * rng.normal(size=8)
    state = StateVector(z / np.linalg.norm(z))
    sampling = sample_signal(synthesize(state), 20000, seed=rng, order=order)
    assert {shot.order for shot in sampling.shots} == {order}
    assert sampling.histogram.chi_square_pvalue(state.probabilities()) > 1e-3


def test_chi_square_rejects_impossible_outcomes():
    histogram = Histogram(1, np.array([5, 1]))
    assert histogram.chi_square_pvalue([1.0, 0.0]) == 0.0


def test_sampling_is_deterministic(example_state):
    a = sample_signal(synthesize(example_state), 500, seed=3)
    b = sample_signal(synthesize(example_state), 500, seed=3)
    assert a.histogram.counts.tolist() == b.histogram.counts.tolist()
    assert [s.u_draws for s in a.shots] == [s.u_draws for s in b.shots]


def test_sample_signal_needs_shots(singlet):
    with pytest.raises(DomainError):
        sample_signal(synthesize(singlet), 0)
