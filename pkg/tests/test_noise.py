"""Tests for the hardware-imperfection models."""

import math

import numpy as np
import pytest

from qmt_emu.errors import ConfigurationError
from qmt_emu.gates import HADAMARD
from qmt_emu.noise import (
    NoiseConfig,
    NoisyChain,
    add_awgn,
    apply_iq_imbalance,
    effective_channel,
    input_states,
    iq_coefficients,
    perturb_coefficients,
    perturb_gate,
)
from qmt_emu.projection import apply_gate_signal
from qmt_emu.signal import (
    Backend,
    FrequencyLayout,
    TonalSignal,
    demodulate,
    render,
    synthesize,
)


def test_zero_noise_is_transparent(example_state):
    chain = NoisyChain(NoiseConfig())
    signal = chain.prepare(example_state)
    assert dict(signal.coefficients) == dict(synthesize(example_state).coefficients)
    out = chain.apply_gate(signal, HADAMARD, 1)
    expected = apply_gate_signal(signal, HADAMARD, 1)
    assert dict(out.coefficients) == dict(expected.coefficients)
    assert chain.readout(out).allclose(chain.readout(expected), atol=0)


def test_noise_config_flags():
    assert NoiseConfig().is_ideal
    assert NoiseConfig().is_deterministic
    skewed = NoiseConfig(phase_skew=0.01)
    assert not skewed.is_ideal
    assert skewed.is_deterministic
    assert not NoiseConfig(gate_jitter=0.1).is_deterministic
    assert NoiseConfig(filter_order=15).filter_model.taps == 15


def test_noise_config_validation():
    with pytest.raises(ConfigurationError):
        NoiseConfig(awgn_sigma=-1)
    with pytest.raises(ConfigurationError):
        NoiseConfig(gain_imbalance=-1)
    with pytest.raises(ConfigurationError):
        NoiseConfig(coefficient_jitter=math.nan)
    with pytest.raises(ConfigurationError):
        NoiseConfig(filter_order=4)


def test_noise_config_from_mapping():
    noise = NoiseConfig.from_mapping({"awgn_sigma": 1, "filter_order": 31})
    assert noise.awgn_sigma == 1.0
    assert noise.filter_order == 31
    with pytest.raises(ConfigurationError):
        NoiseConfig.from_mapping({"shot_noise": 0.1})
    with pytest.raises(ConfigurationError):
        NoiseConfig.from_mapping({"awgn_sigma": "loud"})


def test_with_changes():
    noise = NoiseConfig(awgn_sigma=0.1).with_changes(gate_jitter=0.2)
    assert noise == NoiseConfig(awgn_sigma=0.1, gate_jitter=0.2)


def test_awgn_needs_sampled_signal(example_state):
    with pytest.raises(ConfigurationError):
        add_awgn(synthesize(example_state), 0.1)
    with pytest.raises(ConfigurationError):
        NoisyChain(NoiseConfig(awgn_sigma=0.1), Backend.TONAL)


def test_awgn_statistics():
    signal = render(TonalSignal(FrequencyLayout.octave(6), {}), 1024, periods=4)
    noisy = add_awgn(signal, 0.5, seed=0)
    assert np.std(noisy.samples.real) == pytest.approx(0.5, rel=0.05)
    assert np.std(noisy.samples.imag) == pytest.approx(0.5, rel=0.05)
    assert add_awgn(signal, 0.0) is signal


def test_demodulated_noise_scales_with_record_length(example_state):
    clean = render(synthesize(example_state), 64)
    expected = demodulate(clean).amplitudes
    rng = np.random.default_rng(12)
    sigma = 0.3
    errors = np.array(
        [
            demodulate(add_awgn(clean, sigma, seed=rng)).amplitudes - expected
            for _ in range(2000)
        ]
    )
    standard_error = sigma / math.sqrt(clean.size)
    assert np.std(errors.real) == pytest.approx(standard_error, rel=0.05)
    assert np.std(errors.imag) == pytest.approx(standard_error, rel=0.05)
    assert abs(np.mean(errors)) < 4 * standard_error / math.sqrt(errors.size)


def test_perturbations_are_seeded(example_state, example_gate):
    a = perturb_coefficients(example_state, 0.1, seed=1)
    b = perturb_coefficients(example_state, 0.1, seed=1)
    assert a.allclose(b, atol=0)
    assert not a.allclose(example_state)
    assert perturb_coefficients(example_state, 0.0) is example_state
    jittered = perturb_gate(example_gate, 0.2, seed=1)
    assert math.isinf(jittered.tolerance)
    assert jittered.unitarity_error > 0
    assert perturb_gate(example_gate, 0.0) is example_gate


def test_iq_coefficients():
    assert iq_coefficients(0.0, 0.0) == pytest.approx((1.0, 0.0))
    mu, nu = iq_coefficients(0.1, 0.0)
    assert mu == pytest.approx(1.05)
    assert nu == pytest.approx(-0.05)


def test_iq_imbalance_creates_image():
    signal = TonalSignal(FrequencyLayout.octave(2), {3: 1.0})
    assert apply_iq_imbalance(signal, 0.0, 0.0) is signal
    impaired = apply_iq_imbalance(signal, 0.1, 0.0)
    assert impaired.coefficient(3) == pytest.approx(1.05)
    assert impaired.coefficient(-3) == pytest.approx(-0.05)


def test_iq_imbalance_matches_rail_model():
    # Q rail received with gain 1.2 and rotated 0.1 rad towards I
    signal = render(TonalSignal(FrequencyLayout.octave(2), {3: 0.6, -1: 0.8j}))
    g, theta = 1.2, 0.1
    i, q = signal.samples.real, signal.samples.imag
    expected = i + 1j * g * (q * math.cos(theta) - i * math.sin(theta))
    impaired = apply_iq_imbalance(signal, g - 1, theta)
    assert np.allclose(impaired.samples, expected)


def test_input_states():
    inputs = input_states(2)
    assert len(inputs) == 4
    assert inputs[1].amplitudes[3] == 1
    assert all(p.norm == pytest.approx(1.0) for p in inputs)


def test_effective_channel_without_noise():
    estimate = effective_channel(NoiseConfig(), 2, trials=3, seed=0)
    assert estimate.depolarizing == pytest.approx(1.0, abs=1e-9)
    assert estimate.residual < 1e-9
    assert len(estimate.outputs) == 4


def test_effective_channel_with_jitter():
    noise = NoiseConfig(coefficient_jitter=0.1)
    estimate = effective_channel(noise, 2, trials=300, seed=1, backend=Backend.TONAL)
    assert 0.8 < estimate.depolarizing < 1.0
    assert all(0.7 < lam < 1.0 for lam in estimate.per_input)


def test_awgn_lowers_channel_fidelity():
    noise = NoiseConfig(awgn_sigma=0.05)
    estimate = effective_channel(noise, 1, trials=100, seed=2)
    assert estimate.depolarizing < 1.0


def test_channel_fidelity_falls_as_awgn_grows():
    lambdas = [
        effective_channel(NoiseConfig(awgn_sigma=sigma), 1, trials=300, seed=4)
        .depolarizing
        for sigma in (0.05, 0.1, 0.2)
    ]
    assert 1.0 > lambdas[0] > lambdas[1] > lambdas[2]


def test_awgn_channel_is_the_same_for_every_input():
    estimate = effective_channel(NoiseConfig(awgn_sigma=0.2), 1, trials=2000, seed=5)
    assert len(estimate.per_input) == 4
    assert np.ptp(estimate.per_input) < 0.25 * (1 - estimate.depolarizing)
