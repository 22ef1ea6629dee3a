"""Global test fixtures for the emulator."""

import math
from pathlib import Path

import pytest
from pytest import fixture

from qmt_emu.oracle import GateU2, StateVector

# Two-qubit example state, amplitudes indexed by x = 2 * x_A + x_B
EXAMPLE_AMPLITUDES = [
    0.6579 - 0.2895j,
    0.5385 + 0.1383j,
    -0.2280 + 0.3953j,
    -0.2460 - 0.4277j,
]
EXAMPLE_GATE_PRINTED = [
    [0.1759 + 0.1836j, 0.4346 + 0.8460j],
    [-0.4346 + 0.8640j, 0.1759 - 0.1836j],
]
EXAMPLE_GATE_UNITARIZED = [
    [0.1759 + 0.1836j, 0.4346 + 0.8640j],
    [-0.4346 + 0.8640j, 0.1759 - 0.1836j],
]


def pytest_addoption(parser):
    """Add custom pytest command line options."""
    parser.addoption(
        "--e2e",
        action="store_true",
        default=False,
        help="run end-to-end tests",
    )


def pytest_configure(config):
    """Register custom markers."""
    config.addinivalue_line("markers", "e2e: mark test as end-to-end test")


def pytest_collection_modifyitems(config, items):
    """Skip end-to-end tests unless --e2e option is used."""
    if config.getoption("--e2e"):
        # When --e2e is used, run all tests including end-to-end tests
        return

    skip_e2e = pytest.mark.skip(reason="need --e2e option to run")
    for item in items:
        if "e2e" in item.keywords:
            item.add_marker(skip_e2e)


@fixture(scope="session")
def fixtures_dir() -> Path:
    """Return path to the test fixtures directory."""
    return Path(__file__).parent / "fixtures"


@fixture(scope="session")
def circuits_dir(fixtures_dir) -> Path:
    return fixtures_dir / "circuits"


@fixture(scope="session")
def example_state() -> StateVector:
    return StateVector(EXAMPLE_AMPLITUDES)


@fixture(scope="session")
def example_gate_printed() -> GateU2:
    """The example gate with its printed entries (slightly non-unitary)."""
    return GateU2(EXAMPLE_GATE_PRINTED, name="example-printed")


@fixture(scope="session")
def example_gate() -> GateU2:
    """The example gate with U01 and U10 sharing the 0.8640 imaginary part."""
    return GateU2(EXAMPLE_GATE_UNITARIZED, name="example")


@fixture(scope="session")
def singlet() -> StateVector:
    return StateVector([0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0])


@fixture(scope="session")
def bell() -> StateVector:
    return StateVector([1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)])
