"""Tests for run configuration resolution."""

from argparse import Namespace

import pytest
from pytest import fixture

from qmt_emu.config import RunConfig, resolve_out_dir, resolve_run_config
from qmt_emu.errors import ConfigurationError
from qmt_emu.noise import NoiseConfig
from qmt_emu.signal import Backend


@fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    """Keep the user's config file and environment out of the tests."""
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    monkeypatch.delenv("QMT_EMU_CONFIG", raising=False)
    monkeypatch.delenv("QMT_EMU_OUT_DIR", raising=False)
    monkeypatch.chdir(tmp_path)


@fixture
def config_file(tmp_path):
    path = tmp_path / "emu.toml"
    path.write_text(
        'backend = "sampled"\n'
        "samples_per_period = 64\n"
        "seed = 42\n"
        "shots = 250\n"
        'measurement_order = [1, 0]\n'
        f'out_dir = "{tmp_path / "from-config"}"\n'
        "\n"
        "[noise]\n"
        "awgn_sigma = 0.01\n"
        "gate_jitter = 0.02\n"
    )
    return path


def test_defaults(tmp_path):
    config = resolve_run_config(Namespace(seed=1))
    assert config.backend is Backend.TONAL
    assert config.samples_per_period is None
    assert config.periods == 1
    assert config.noise.is_ideal
    assert config.shots == 1000
    assert config.out_dir == tmp_path
    assert config.measurement_order is None


def test_config_file(config_file, tmp_path):
    config = resolve_run_config(Namespace(config=str(config_file)))
    assert config.backend is Backend.SAMPLED
    assert config.samples_per_period == 64
    assert config.seed == 42
    assert config.shots == 250
    assert config.measurement_order == (1, 0)
    assert config.noise == NoiseConfig(awgn_sigma=0.01, gate_jitter=0.02)
    assert config.out_dir == tmp_path / "from-config"


def test_config_file_from_environment(config_file, monkeypatch):
    monkeypatch.setenv("QMT_EMU_CONFIG", str(config_file))
    assert resolve_run_config(Namespace()).seed == 42


def test_command_line_wins(config_file, tmp_path):
    args = Namespace(
        config=str(config_file),
        seed=7,
        shots=10,
        gate_jitter=0.5,
        measurement_order="0,1",
        out=str(tmp_path / "cli"),
    )
    config = resolve_run_config(args)
    assert config.seed == 7
    assert config.shots == 10
    assert config.noise.gate_jitter == 0.5
    assert config.noise.awgn_sigma == 0.01
    assert config.measurement_order == (0, 1)
    assert config.out_dir == tmp_path / "cli"


def test_out_dir_resolution_order(monkeypatch, tmp_path):
    from_file = {"out_dir": str(tmp_path / "file")}
    assert resolve_out_dir(Namespace(), {}) == tmp_path
    assert resolve_out_dir(Namespace(), from_file) == tmp_path / "file"
    monkeypatch.setenv("QMT_EMU_OUT_DIR", str(tmp_path / "env"))
    assert resolve_out_dir(Namespace(), from_file) == tmp_path / "env"
    args = Namespace(out=str(tmp_path / "cli"))
    assert resolve_out_dir(args, from_file) == tmp_path / "cli"


def test_missing_explicit_config_file(tmp_path):
    with pytest.raises(ConfigurationError):
        resolve_run_config(Namespace(config=str(tmp_path / "missing.toml")))


def test_bad_config_files(tmp_path):
    path = tmp_path / "bad.toml"
    for text in ("seed = [", "colour = 1\n", "[noise]\nhiss = 1\n", "noise = 3\n"):
        path.write_text(text)
        with pytest.raises(ConfigurationError):
            resolve_run_config(Namespace(config=str(path)))


def test_awgn_selects_sampled_backend():
    config = resolve_run_config(Namespace(noise_sigma=0.1, seed=0))
    assert config.backend is Backend.SAMPLED
    with pytest.raises(ConfigurationError):
        resolve_run_config(Namespace(noise_sigma=0.1, backend="tonal", seed=0))


def test_filter_order_merges_into_noise(tmp_path):
    path = tmp_path / "fir.toml"
    path.write_text("filter_order = 31\n")
    config = resolve_run_config(Namespace(config=str(path), seed=0))
    assert config.noise.filter_order == 31
    assert config.filter_order == 31
    with pytest.raises(ConfigurationError):
        RunConfig(noise=NoiseConfig(filter_order=15), filter_order=31, seed=0)


def test_run_config_validation():
    with pytest.raises(ConfigurationError):
        RunConfig(backend="analog", seed=0)
    with pytest.raises(ConfigurationError):
        RunConfig(periods=0, seed=0)
    with pytest.raises(ConfigurationError):
        RunConfig(shots=0, seed=0)
    with pytest.raises(ConfigurationError):
        resolve_run_config(Namespace(measurement_order="a,b", seed=0))


def test_missing_seed_is_drawn():
    config = RunConfig()
    assert isinstance(config.seed, int)


def test_streams_are_reproducible():
    config = RunConfig(seed=5)
    assert config.stream("shots").random() == RunConfig(seed=5).stream("shots").random()
    assert config.stream("shots").random() != config.stream("noise").random()
    with pytest.raises(KeyError):
        config.stream("weather")
