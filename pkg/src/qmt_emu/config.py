"""Run configuration and its resolution from CLI, environment and config file.

Every setting is resolved in this order:

1. command-line option
2. environment ($QMT_EMU_OUT_DIR for the output directory; $QMT_EMU_CONFIG
   names the config file)
3. config file (--config FILE, else $QMT_EMU_CONFIG, else
   ~/.config/qmt-emu/config.toml), with a [noise] table
4. built-in default (output directory falls back to the current directory)
"""

import logging
import os
import tomllib
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .noise import NoiseConfig, NoisyChain
from .signal import Backend
from .utils import named_stream

logger = logging.getLogger(__name__)

CONFIG_ENV = "QMT_EMU_CONFIG"
OUT_DIR_ENV = "QMT_EMU_OUT_DIR"
DEFAULT_CONFIG_PATH = "~/.config/qmt-emu/config.toml"
DEFAULT_SHOTS = 1000

# command-line dests overriding NoiseConfig fields
NOISE_OPTIONS = {
    "noise_sigma": "awgn_sigma",
    "coefficient_jitter": "coefficient_jitter",
    "gate_jitter": "gate_jitter",
}


@dataclass
class RunConfig:
    """Settings shared by every command.

    Args:
        backend: ``tonal`` or ``sampled`` signal representation
        samples_per_period: Sampled grid; the layout's oversampling floor if None
        periods: Integration length in fundamental periods
        noise: Hardware error magnitudes
        seed: Root seed of every random stream; drawn fresh when None
        shots: Shots for sampling, or per setting for tomography
        out_dir: Directory receiving output files
        measurement_order: Qubit order of register readout (ascending if None)
        filter_order: FIR comb taps, 0 for ideal filters
    """

    backend: Backend = Backend.TONAL
    samples_per_period: int | None = None
    periods: int = 1
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int | None = None
    shots: int = DEFAULT_SHOTS
    out_dir: Path = field(default_factory=Path.cwd)
    measurement_order: tuple[int, ...] | None = None
    filter_order: int = 0

    def __post_init__(self):
        try:
            self.backend = Backend(self.backend)
        except ValueError:
            raise ConfigurationError(f"Unknown backend {self.backend!r}") from None
        self.out_dir = Path(self.out_dir).expanduser()
        if self.periods < 1:
            raise ConfigurationError(f"periods must be >= 1, got {self.periods}")
        if self.shots < 1:
            raise ConfigurationError(f"shots must be >= 1, got {self.shots}")
        if self.filter_order and self.noise.filter_order not in (0, self.filter_order):
            raise ConfigurationError(
                f"filter_order {self.filter_order} conflicts with noise "
                f"filter_order {self.noise.filter_order}"
            )
        if self.filter_order:
            self.noise = self.noise.with_changes(filter_order=self.filter_order)
        self.filter_order = self.noise.filter_order
        if self.noise.awgn_sigma > 0 and self.backend is Backend.TONAL:
            raise ConfigurationError("Additive noise needs the sampled backend")
        if self.seed is None:
            self.seed = int(np.random.SeedSequence().entropy % 2**63)
            logger.info(f"No seed given, using {self.seed}")
        if self.measurement_order is not None:
            self.measurement_order = tuple(int(q) for q in self.measurement_order)

    def stream(self, name: str) -> np.random.Generator:
        return named_stream(self.seed, name)

    def chain(self) -> NoisyChain:
        """Signal pipeline of this configuration, drawing from the noise stream."""
        return NoisyChain(
            self.noise,
            self.backend,
            self.samples_per_period,
            self.periods,
            self.stream("noise"),
        )


def config_file_path(args) -> Path:
    if getattr(args, "config", None):
        return Path(args.config).expanduser()
    env_path = os.environ.get(CONFIG_ENV)
    if env_path:
        return Path(env_path).expanduser()
    return Path(DEFAULT_CONFIG_PATH).expanduser()


def load_config_file(path: Path, required: bool = False) -> dict:
    """Read the TOML config; a missing default file is an empty config."""
    if not path.exists():
        if required:
            raise ConfigurationError(f"Config file {path} not found")
        logger.debug(f"No config file at {path}")
        return {}
    try:
        with open(path, "rb") as f:
            config = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"Bad config file {path}: {e}") from e
    logger.debug(f"Loaded config from {path}")
    return config


def resolve_out_dir(args, config: dict) -> Path:
    """Output directory using the resolution order."""
    # 1. Command-line option
    if getattr(args, "out", None):
        return Path(args.out).expanduser()

    # 2. Environment variable
    env_dir = os.environ.get(OUT_DIR_ENV)
    if env_dir:
        return Path(env_dir).expanduser()

    # 3. Config file
    if config.get("out_dir"):
        return Path(config["out_dir"]).expanduser()

    # 4. Fallback = current working directory
    return Path.cwd()


def _parse_order(value) -> tuple[int, ...] | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"Bad measurement order {value!r}") from None


def resolve_run_config(args) -> RunConfig:
    """Merge command-line options, environment and config file into a RunConfig."""
    explicit_file = bool(getattr(args, "config", None) or os.environ.get(CONFIG_ENV))
    config = load_config_file(config_file_path(args), required=explicit_file)
    noise_table = config.get("noise", {})
    if not isinstance(noise_table, dict):
        raise ConfigurationError("[noise] must be a table")
    noise_values = dict(noise_table)
    if "filter_order" in config:
        noise_values.setdefault("filter_order", config["filter_order"])
    for option, name in NOISE_OPTIONS.items():
        value = getattr(args, option, None)
        if value is not None:
            noise_values[name] = value
    if getattr(args, "filter_order", None) is not None:
        noise_values["filter_order"] = args.filter_order
    noise = NoiseConfig.from_mapping(noise_values)

    def pick(name, default=None):
        value = getattr(args, name, None)
        if value is not None:
            return value
        return config.get(name, default)

    known = {f.name for f in fields(RunConfig)} | {"noise"}
    unknown = set(config) - known
    if unknown:
        raise ConfigurationError(f"Unknown config settings: {sorted(unknown)}")

    backend = pick("backend")
    if backend is None:
        backend = Backend.SAMPLED if noise.awgn_sigma > 0 else Backend.TONAL
        logger.debug(f"Backend defaulted to {backend}")
    try:
        run_config = RunConfig(
            backend=backend,
            samples_per_period=pick("samples_per_period"),
            periods=int(pick("periods", 1)),
            noise=noise,
            seed=pick("seed"),
            shots=int(pick("shots", DEFAULT_SHOTS)),
            out_dir=resolve_out_dir(args, config),
            measurement_order=_parse_order(pick("measurement_order")),
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Bad run configuration: {e}") from e
    logger.debug(f"Resolved {run_config}")
    return run_config
