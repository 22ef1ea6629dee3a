"""Command line interface for the emulator."""

import logging
import math
from argparse import ArgumentParser, Namespace, RawDescriptionHelpFormatter
from pathlib import Path

from .analysis import fidelity_mixed
from .circuit import run_circuit, run_oracle, sample_shots
from .config import RunConfig, resolve_run_config
from .errors import ConfigurationError, EmulatorError
from .experiments import (
    GATE_VOLTAGE_JITTER,
    SINGLET,
    SINGLET_SYNTHESIS_JITTER,
    Ensemble,
    FidelityExperiment,
    fidelity_histogram,
)
from .export import (
    write_csv,
    write_density_matrix,
    write_fidelities,
    write_histogram,
    write_report,
    write_shot_log,
    write_signal,
    write_spectrum,
    write_state,
    write_tomo_dataset,
)
from .oracle import StateVector, basis_state
from .parser import CircuitProgram, parse_program
from .resources import resource_estimate
from .signal import Backend, demodulate_report
from .tomography import (
    DressedSource,
    MixtureSource,
    NoisySource,
    PureSource,
    StateSource,
    collect_tomo_data,
    exact_tomo_data,
    log_likelihood,
    purity,
    qst_linear_inversion,
    qst_mle,
)

logger = logging.getLogger(__name__)

NAMED_STATES = {
    "singlet": SINGLET,
    "bell": StateVector([1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)]),
    "zero": basis_state(0, 2),
}


def main(argv: list[str] | None = None) -> int:
    """Entry point of the `emu` command."""
    args = make_parser().parse_args(argv)
    config_logging(args)
    try:
        args.handler(args)
    except EmulatorError as e:
        logger.error(f"{args.command} failed: {e}")
        for issue in getattr(e, "issues", []):
            logger.error(f"  {issue}")
        return 1
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    return 0


def load_program(path: str) -> CircuitProgram:
    text = Path(path).read_text(encoding="utf-8")
    return parse_program(text)


def cmd_run(args: Namespace) -> None:
    """Run a circuit and write its final signal, spectrum and amplitudes."""
    config = resolve_run_config(args)
    program = load_program(args.circuit)
    result = run_circuit(
        program,
        chain=config.chain(),
        seed=config.stream("shots"),
        order=config.measurement_order,
    )
    report = demodulate_report(result.signal)
    out = config.out_dir
    write_state(out / "state.csv", report.state)
    write_spectrum(out / "spectrum.csv", result.signal)
    write_signal(out / "signal.csv", result.signal)
    if result.measurements:
        write_shot_log(out / "measurements.csv", result.measurements)
    if report.residual_power > 1e-9:
        logger.warning(f"Out-of-band power {report.residual_power:.3g}")
    if not program.has_measurements and config.noise.is_ideal:
        expected = run_oracle(program)
        error = max(abs(report.state.amplitudes - expected.amplitudes))
        logger.info(f"Max deviation from state-vector reference: {error:.3g}")


def cmd_sample(args: Namespace) -> None:
    """Sample register readouts of a circuit."""
    config = resolve_run_config(args)
    program = load_program(args.circuit)
    sampling = sample_shots(
        program,
        None,
        config.shots,
        seed=config.stream("shots"),
        chain=config.chain(),
        order=config.measurement_order,
    )
    write_histogram(config.out_dir / "histogram.csv", sampling.histogram)
    write_shot_log(config.out_dir / "shots.csv", sampling.shots)
    for label, count, freq in sampling.histogram.rows():
        logger.info(f"{label}: {count} ({freq:.4f})")


def tomography_source(args: Namespace, config: RunConfig) -> StateSource:
    noisy = not config.noise.is_ideal
    if noisy and args.source == "dressed":
        raise ConfigurationError("Dressed tomography does not model hardware noise")
    if args.circuit:
        state = run_oracle(load_program(args.circuit))
    elif args.state == "mixed":
        if noisy:
            raise ConfigurationError("The mixed source does not model hardware noise")
        return MixtureSource.maximally_mixed(2, backend=config.backend)
    else:
        state = NAMED_STATES[args.state]
    state = state.normalized()
    if noisy:
        return NoisySource(state, config.chain())
    grid = (config.backend, config.samples_per_period, config.periods)
    if args.source == "dressed":
        return DressedSource(state, *grid)
    return PureSource(state, *grid)


def cmd_tomo(args: Namespace) -> None:
    """Reconstruct a two-qubit state and report its fidelity."""
    config = resolve_run_config(args)
    source = tomography_source(args, config)
    target = source.target()
    if args.exact:
        data = exact_tomo_data(target, config.shots)
    else:
        rng = config.stream("tomography")
        data = collect_tomo_data(source, config.shots, seed=rng)
    initial = qst_linear_inversion(data)
    result = qst_mle(data, initial)
    fidelity = fidelity_mixed(result.rho, target)
    out = config.out_dir
    write_tomo_dataset(out / "tomo_data.csv", data)
    write_density_matrix(out / "rho.txt", result.rho)
    write_report(
        out / "tomo_report.csv",
        {
            "fidelity": fidelity,
            "linear_inversion_fidelity": fidelity_mixed(initial, target),
            "log_likelihood": result.log_likelihood,
            "initial_log_likelihood": log_likelihood(initial, data),
            "purity": purity(result.rho),
            "iterations": result.iterations,
            "converged": result.converged,
        },
    )
    logger.info(f"Reconstructed state fidelity {fidelity:.6f}")


def cmd_estimate(args: Namespace) -> None:
    """Bandwidth, gate time and filter counts of an n-qubit device."""
    estimate = resource_estimate(args.qubits, args.f0)
    out = Path(args.out).expanduser() if args.out else Path.cwd()
    rows = [
        ("num_qubits", estimate.num_qubits),
        ("base_frequency_hz", estimate.base_frequency_hz),
        ("bandwidth_hz", estimate.bandwidth_hz),
        ("gate_time_s", estimate.gate_time_s),
        ("comb_passbands", estimate.comb_passbands),
        ("projection_ops_per_2q_gate", estimate.projection_ops_per_2q_gate),
    ]
    write_csv(out / "resources.csv", ("quantity", "value"), rows)
    for name, value in rows:
        logger.info(f"{name}: {value:g}")


def cmd_fidelity(args: Namespace) -> None:
    """Fidelity histogram of the noisy synthesis or gate pipeline."""
    config = resolve_run_config(args)
    noise = config.noise
    if args.calibrated:
        noise = noise.with_changes(coefficient_jitter=SINGLET_SYNTHESIS_JITTER)
        if args.ensemble == Ensemble.GATE:
            noise = noise.with_changes(gate_jitter=GATE_VOLTAGE_JITTER)
    experiment = FidelityExperiment(
        ensemble=args.ensemble,
        noise=noise,
        realizations=args.realizations,
        backend=config.backend,
    )
    ensemble = fidelity_histogram(experiment, config.seed)
    write_fidelities(config.out_dir / "fidelity.csv", ensemble)
    logger.info(f"Mean fidelity {ensemble.mean:.6f} (std {ensemble.std:.3g})")


def make_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="emu",
        description="Classical analog emulation of quantum computation",
        formatter_class=RawDescriptionHelpFormatter,
        epilog="""
Output files (in the resolved output directory):
  run       state.csv spectrum.csv signal.csv [measurements.csv]
  sample    histogram.csv shots.csv
  tomo      tomo_data.csv rho.txt tomo_report.csv
  estimate  resources.csv
  fidelity  fidelity.csv
""",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = _add_command(commands, "run", cmd_run)
    run.add_argument("--circuit", required=True, metavar="FILE", help="Circuit file")

    sample = _add_command(commands, "sample", cmd_sample)
    sample.add_argument("--circuit", required=True, metavar="FILE", help="Circuit file")

    tomo = _add_command(commands, "tomo", cmd_tomo)
    prepared = tomo.add_mutually_exclusive_group()
    prepared.add_argument(
        "--state",
        choices=[*NAMED_STATES, "mixed"],
        default="singlet",
        help="Named two-qubit state (default: singlet)",
    )
    prepared.add_argument(
        "--circuit", metavar="FILE", help="Two-qubit circuit whose output is measured"
    )
    tomo.add_argument(
        "--source",
        choices=["pure", "dressed"],
        default="pure",
        help="Measure the bare state or per-shot dressed copies",
    )
    tomo.add_argument(
        "--exact",
        action="store_true",
        help="Use expected counts instead of sampled ones",
    )

    estimate = _add_command(commands, "estimate", cmd_estimate, run_options=False)
    estimate.add_argument("--qubits", type=int, required=True, help="Register size n")
    estimate.add_argument(
        "--f0", type=float, default=1000.0, help="Base frequency in Hz (default: 1000)"
    )

    fidelity = _add_command(commands, "fidelity", cmd_fidelity)
    fidelity.add_argument(
        "--ensemble",
        type=Ensemble,
        choices=list(Ensemble),
        default=Ensemble.STATE,
        help="Synthesis only, or synthesis plus a Haar-random gate",
    )
    fidelity.add_argument(
        "--realizations", type=int, default=500, help="Number of noisy runs"
    )
    fidelity.add_argument(
        "--calibrated",
        action="store_true",
        help="Use the calibrated coefficient and gate jitter",
    )
    return parser


def _add_command(
    commands, name: str, handler, run_options: bool = True
) -> ArgumentParser:
    command = commands.add_parser(name, help=handler.__doc__.splitlines()[0])
    command.set_defaults(handler=handler)
    command.add_argument(
        "-v", "--verbose", action="store_true", help="Enable verbose output"
    )
    command.add_argument(
        "-q", "--quiet", action="store_true", help="Suppress INFO and below messages"
    )
    command.add_argument(
        "--out",
        metavar="DIR",
        help="Output directory. "
        "Resolution order: 1. --out "
        "2. $QMT_EMU_OUT_DIR "
        "3. config file "
        "4. current directory",
    )
    if not run_options:
        return command
    command.add_argument("--config", metavar="FILE", help="TOML config file")
    command.add_argument("--backend", choices=[b.value for b in Backend])
    command.add_argument("--samples-per-period", type=int, metavar="N")
    command.add_argument("--periods", type=int, metavar="N")
    command.add_argument("--seed", type=int)
    command.add_argument("--shots", type=int)
    command.add_argument("--noise-sigma", type=float, metavar="SIGMA")
    command.add_argument("--coefficient-jitter", type=float, metavar="SIGMA")
    command.add_argument("--gate-jitter", type=float, metavar="SIGMA")
    command.add_argument("--filter-order", type=int, metavar="TAPS")
    command.add_argument(
        "--order",
        dest="measurement_order",
        metavar="Q,Q,...",
        help="Qubit order of register readout (default: ascending)",
    )
    return command


def config_logging(args) -> None:
    """Configure logging based on command line arguments."""
    if args.quiet:
        log_level = logging.WARNING
    elif args.verbose:
        log_level = logging.DEBUG
    else:
        log_level = logging.INFO

    logging.basicConfig(
        level=log_level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )


if __name__ == "__main__":
    raise SystemExit(main())
