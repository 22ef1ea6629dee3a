import numpy as np
import pytest

from qmt_emu.errors import ConfigurationError
from qmt_emu.filters import (
    IDEAL,
    CombFilterSpec,
    FilterModel,
    check_filter_disjointness,
    comb_filter,
    images_disjoint,
    sublattice,
)
from qmt_emu.oracle import StateVector
from qmt_emu.signal import FrequencyLayout, TonalSignal, analyze, render, synthesize


def test_sublattice():
    assert sublattice(FrequencyLayout.octave(2), 1) == {1, -1}
    assert sublattice(FrequencyLayout.octave(2), 0) == {2, -2}
    assert sublattice(FrequencyLayout.octave(3), 1) == {5, 3, -3, -5}
    assert sublattice(FrequencyLayout.octave(1), 0) == {0}


@pytest.mark.parametrize("n", range(2, 9))
def test_positive_passbands(n):
    layout = FrequencyLayout.octave(n)
    for qubit in range(n):
        positive = [k for k in sublattice(layout, qubit) if k > 0]
        assert len(positive) == 2**n // 4


def test_comb_filter_restricts_tonal_signal():
    layout = FrequencyLayout.octave(2)
    signal = TonalSignal(layout, {3: 1 + 1j, 1: 0.5})
    kept = comb_filter(signal, CombFilterSpec(frozenset({1, -1})))
    assert dict(kept.coefficients) == {1: 0.5}


def test_full_lattice_is_identity():
    layout = FrequencyLayout.octave(3)
    rng = np.random.default_rng(0)
    state = StateVector(rng.normal(size=8) + 1j * rng.normal(size=8))
    signal = synthesize(state)
    kept = comb_filter(signal, CombFilterSpec(sublattice(layout)))
    assert dict(kept.coefficients) == dict(signal.coefficients)


def test_sampled_filter_matches_tonal():
    rng = np.random.default_rng(1)
    state = StateVector(rng.normal(size=8) + 1j * rng.normal(size=8))
    signal = synthesize(state)
    spec = CombFilterSpec(frozenset({7, 1, -3}))
    tonal = comb_filter(signal, spec)
    sampled = analyze(comb_filter(render(signal), spec))
    assert set(sampled.coefficients) == {7, 1, -3}
    for k, c in tonal.coefficients.items():
        assert sampled.coefficient(k) == pytest.approx(c, abs=1e-10)


def test_filter_disjointness_up_to_twelve_qubits():
    assert check_filter_disjointness(12) == []
    assert images_disjoint(FrequencyLayout.octave(4), 2)


def test_filter_model_validation():
    assert IDEAL.is_ideal
    with pytest.raises(ConfigurationError):
        FilterModel(taps=4)
    with pytest.raises(ConfigurationError):
        FilterModel(taps=-1)


def test_ideal_filter_has_no_ripple():
    spec = CombFilterSpec(frozenset({1, -1}))
    lattice = {3, 1, -1, -3}
    assert spec.ripple(lattice) == (0.0, 0.0)


def test_fir_filter_is_real_for_symmetric_keep_set():
    spec = CombFilterSpec(frozenset({1, -1}), FilterModel(taps=31))
    offsets, weights = spec.taps
    assert offsets.tolist() == list(range(-15, 16))
    response = spec.response(np.arange(-8, 9))
    assert np.allclose(response.imag, 0, atol=1e-12)
    pass_error, stop_gain = spec.ripple({3, 1, -1, -3})
    assert pass_error >= 0
    assert stop_gain >= 0


def test_fir_taps_must_fit_design_grid():
    layout = FrequencyLayout.octave(2)
    signal = TonalSignal(layout, {1: 1})
    spec = CombFilterSpec(frozenset({1, -1}), FilterModel(taps=33))
    with pytest.raises(ConfigurationError):
        comb_filter(signal, spec)


def test_fir_filter_backends_agree():
    rng = np.random.default_rng(6)
    state = StateVector(rng.normal(size=4) + 1j * rng.normal(size=4))
    signal = synthesize(state)
    spec = CombFilterSpec(frozenset({1, -1}), FilterModel(taps=15))
    tonal = comb_filter(signal, spec)
    sampled = analyze(comb_filter(render(signal), spec))
    for k in (3, 1, -1, -3):
        assert sampled.coefficient(k) == pytest.approx(tonal.coefficient(k), abs=1e-12)
