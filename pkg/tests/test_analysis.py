"""Tests for fidelities, dressed states and random unitaries."""

import math

import numpy as np
import pytest

from qmt_emu.analysis import (
    DRESSING_SCALE,
    DensityMatrix,
    dress,
    fidelity_mixed,
    fidelity_pure,
    haar_unitary,
    psd_sqrt,
    random_state,
)
from qmt_emu.errors import DomainError
from qmt_emu.oracle import StateVector, basis_state


def test_fidelity_pure(example_state):
    assert fidelity_pure(example_state, example_state) == pytest.approx(1.0)
    assert fidelity_pure(basis_state(0, 2), basis_state(3, 2)) == 0.0
    phased = StateVector(example_state.amplitudes * np.exp(0.7j) * 3)
    assert fidelity_pure(example_state, phased) == pytest.approx(1.0)


def test_fidelity_pure_is_not_squared():
    plus = StateVector([1 / math.sqrt(2), 1 / math.sqrt(2)])
    assert fidelity_pure(basis_state(0, 1), plus) == pytest.approx(1 / math.sqrt(2))


def test_fidelity_of_zero_vector():
    with pytest.raises(DomainError):
        fidelity_pure(StateVector([0, 0]), basis_state(0, 1))


def test_fidelity_mixed_reduces_to_pure(example_state, singlet):
    rho = DensityMatrix.from_state(example_state)
    sigma = DensityMatrix.from_state(singlet)
    assert fidelity_mixed(rho, sigma) == pytest.approx(
        fidelity_pure(example_state, singlet), abs=1e-6
    )
    assert fidelity_mixed(sigma, sigma) == pytest.approx(1.0, abs=1e-6)


def test_fidelity_mixed_matches_pure_on_random_pairs():
    rng = np.random.default_rng(21)
    for _ in range(100):
        a = random_state(2, seed=rng)
        b = random_state(2, seed=rng)
        mixed = fidelity_mixed(DensityMatrix.from_state(a), DensityMatrix.from_state(b))
        assert abs(mixed - fidelity_pure(a, b)) <= 1e-10


def test_fidelity_of_maximally_mixed_and_singlet(singlet):
    mixed = DensityMatrix.maximally_mixed(2)
    rho = DensityMatrix.from_state(singlet)
    assert fidelity_mixed(mixed, rho) == pytest.approx(0.5, abs=1e-6)


def test_fidelity_mixed_ignores_trace(singlet):
    rho = DensityMatrix.from_state(singlet)
    scaled = DensityMatrix(rho.matrix * 5)
    assert fidelity_mixed(scaled, rho) == pytest.approx(1.0, abs=1e-6)


def test_fidelity_mixed_is_symmetric():
    rng = np.random.default_rng(21)
    for _ in range(20):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = DensityMatrix(a @ a.conj().T)
        sigma = DensityMatrix(b @ b.conj().T)
        forward = fidelity_mixed(rho, sigma)
        assert 0 < forward <= 1 + 1e-12
        assert fidelity_mixed(sigma, rho) == pytest.approx(forward, abs=1e-9)


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix([[1, 1j], [0, 0]])
    with pytest.raises(DomainError):
        DensityMatrix([[1, 0], [0, -0.5]])
    with pytest.raises(DomainError):
        DensityMatrix(np.eye(3) / 3)
    with pytest.raises(DomainError):
        DensityMatrix.from_state(StateVector([0, 0]))


def test_density_matrix_expectation(singlet):
    rho = DensityMatrix.from_state(singlet)
    z = np.diag([1, -1])
    assert rho.trace == pytest.approx(1.0)
    assert rho.expectation(np.kron(z, z)) == pytest.approx(-1.0)


def test_psd_sqrt_clips_negative_eigenvalues():
    root = psd_sqrt(np.diag([4.0, -1e-12]))
    assert np.allclose(root, np.diag([2.0, 0.0]))


def test_psd_sqrt_floor_drops_small_eigenvalues():
    root = psd_sqrt(np.diag([1.0, 1e-16]), floor=1e-13)
    assert np.allclose(root, np.diag([1.0, 0.0]), atol=1e-15)


def test_dress(singlet):
    dressed = dress(singlet, seed=2)
    assert dressed.scale == DRESSING_SCALE
    assert np.linalg.norm(dressed.noise) == pytest.approx(1.0)
    assert np.allclose(
        dressed.amplitudes, DRESSING_SCALE * singlet.amplitudes + dressed.noise
    )
    assert dressed.normalized().norm == pytest.approx(1.0)
    again = dress(singlet, seed=2)
    assert np.array_equal(again.amplitudes, dressed.amplitudes)


def test_dress_needs_normalized_state():
    with pytest.raises(DomainError):
        dress(StateVector([1, 1]), seed=0)


def test_dressed_ensemble_is_noisy(singlet):
    rng = np.random.default_rng(9)
    fidelities = [
        fidelity_pure(dress(singlet, rng).state, singlet) for _ in range(2000)
    ]
    assert 0.2 < np.mean(fidelities) < 0.8
    assert min(fidelities) < max(fidelities)


def test_dressed_norm_moment(example_state):
    rng = np.random.default_rng(10)
    state = example_state.normalized()
    norms = [np.linalg.norm(dress(state, rng).amplitudes) ** 2 for _ in range(20000)]
    assert np.mean(norms) == pytest.approx(DRESSING_SCALE**2 + 1, abs=0.01)


def test_haar_unitary():
    rng = np.random.default_rng(0)
    for dim in (1, 2, 4):
        u = haar_unitary(dim, rng)
        assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)
    with pytest.raises(DomainError):
        haar_unitary(0)


def test_haar_first_entry_moments():
    rng = np.random.default_rng(1)
    weights = [abs(haar_unitary(2, rng)[0, 0]) ** 2 for _ in range(2000)]
    # |U00|^2 is uniform on [0, 1] for 2x2 Haar unitaries
    assert np.mean(weights) == pytest.approx(0.5, abs=0.03)
    assert np.var(weights) == pytest.approx(1 / 12, abs=0.01)


def test_random_state():
    state = random_state(3, seed=4)
    assert state.num_qubits == 3
    assert state.norm == pytest.approx(1.0)
    assert random_state(3, seed=4).allclose(state, atol=0)
