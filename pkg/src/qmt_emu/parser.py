"""Circuit file parsing and formatting.

Circuits are plain text, one instruction per line, `#` starting a comment:

    qubits 2
    init [0.6579-0.2895j, 0.5385+0.1383j, -0.2280+0.3953j, -0.2460-0.4277j]
    h 1
    cnot 1 0
    gate1 0 [[0.1759+0.1836j, 0.4346+0.8640j], [-0.4346+0.8640j, 0.1759-0.1836j]]
    measure_all

Parsing reports every problem in the file at once, each with its line
number, through a single CircuitParseError.
"""

from dataclasses import dataclass
from logging import getLogger
from re import compile

import numpy as np

from .errors import CircuitParseError, DomainError, ParseIssue
from .gates import NAMED_CONTROLLED_GATES, NAMED_GATES
from .oracle import GateU2, StateVector, basis_state
from .utils import format_complex_exact

logger = getLogger(__name__)

# 2**N amplitudes are allocated up front
MAX_QUBITS = 20

_QUBITS = compile(r"qubits\s+(\d+)")
_INIT = compile(r"init\s+(\[.*\])")
_NAMED = compile(r"([a-z]+)\s+(\d+)(?:\s+(\d+))?")
_GATE1 = compile(r"gate1\s+(\d+)\s+(\[.*\])")
_CGATE = compile(r"cgate\s+(\d+)\s+(\d+)\s+(\[.*\])")
_MEASURE = compile(r"measure\s+(\d+)")
_MATRIX = compile(r"\[\[([^\[\]]+)\],\[([^\[\]]+)\]\]")


@dataclass(frozen=True)
class Gate1:
    """Single-qubit gate on `target`; `name` is set for named gates."""

    target: int
    gate: GateU2
    name: str | None = None


@dataclass(frozen=True)
class ControlledGate:
    control: int
    target: int
    gate: GateU2
    name: str | None = None


@dataclass(frozen=True)
class Measure:
    qubit: int


@dataclass(frozen=True)
class MeasureAll:
    pass


Instruction = Gate1 | ControlledGate | Measure | MeasureAll


@dataclass(frozen=True, eq=False)
class CircuitProgram:
    """A validated circuit.

    Args:
        num_qubits: Register size n
        instructions: Gates and measurements in program order
        initial: Starting state; |0...0> when None
    """

    num_qubits: int
    instructions: tuple[Instruction, ...] = ()
    initial: StateVector | None = None

    @property
    def initial_state(self) -> StateVector:
        if self.initial is None:
            return basis_state(0, self.num_qubits)
        return self.initial

    @property
    def gates(self) -> tuple[Gate1 | ControlledGate, ...]:
        return tuple(
            i for i in self.instructions if isinstance(i, Gate1 | ControlledGate)
        )

    @property
    def has_measurements(self) -> bool:
        return any(isinstance(i, Measure | MeasureAll) for i in self.instructions)


def _parse_complex_list(text: str) -> list[complex]:
    return [complex(item) for item in text.split(",")]


def parse_vector(text: str) -> list[complex]:
    """Parse `[a0, a1, ...]` complex literals."""
    compact = "".join(text.split())
    if not (compact.startswith("[") and compact.endswith("]")):
        raise ValueError(f"malformed vector {text!r}")
    return _parse_complex_list(compact[1:-1])


def parse_matrix(text: str) -> GateU2:
    """Parse `[[U00, U01], [U10, U11]]` into a gate (default tolerance)."""
    match = _MATRIX.fullmatch("".join(text.split()))
    if not match:
        raise ValueError(f"malformed 2x2 matrix {text!r}")
    rows = [_parse_complex_list(row) for row in match.groups()]
    if any(len(row) != 2 for row in rows):
        raise ValueError(f"malformed 2x2 matrix {text!r}")
    return GateU2(rows)


class _LineParser:
    """Accumulates instructions and issues for one circuit text."""

    def __init__(self):
        self.num_qubits: int | None = None
        self.initial: StateVector | None = None
        self.instructions: list[Instruction] = []
        self.issues: list[ParseIssue] = []

    def qubit(self, text: str) -> int:
        qubit = int(text)
        if qubit >= self.num_qubits:
            raise DomainError(
                f"qubit {qubit} out of range for {self.num_qubits} qubits"
            )
        return qubit

    def pair(self, control: str, target: str) -> tuple[int, int]:
        control, target = self.qubit(control), self.qubit(target)
        if control == target:
            raise DomainError(f"control and target are both qubit {control}")
        return control, target

    def feed(self, line: str) -> None:
        if self.num_qubits is None:
            if match := _QUBITS.fullmatch(line):
                count = int(match.group(1))
                if not 1 <= count <= MAX_QUBITS:
                    raise DomainError(f"qubit count {count} outside 1..{MAX_QUBITS}")
                self.num_qubits = count
                return
            raise DomainError(f"expected 'qubits N' before {line!r}")
        if _QUBITS.fullmatch(line):
            raise DomainError("qubit count given twice")
        if match := _INIT.fullmatch(line):
            self.set_initial(parse_vector(match.group(1)))
        elif match := _GATE1.fullmatch(line):
            self.instructions.append(
                Gate1(self.qubit(match.group(1)), parse_matrix(match.group(2)))
            )
        elif match := _CGATE.fullmatch(line):
            control, target = self.pair(match.group(1), match.group(2))
            self.instructions.append(
                ControlledGate(control, target, parse_matrix(match.group(3)))
            )
        elif match := _MEASURE.fullmatch(line):
            self.instructions.append(Measure(self.qubit(match.group(1))))
        elif line == "measure_all":
            self.instructions.append(MeasureAll())
        elif match := _NAMED.fullmatch(line):
            self.named(*match.groups())
        else:
            raise DomainError(f"unrecognized instruction {line!r}")

    def named(self, name: str, first: str, second: str | None) -> None:
        if name in NAMED_GATES:
            if second is not None:
                raise DomainError(f"gate {name} takes one qubit")
            self.instructions.append(Gate1(self.qubit(first), NAMED_GATES[name], name))
        elif name in NAMED_CONTROLLED_GATES:
            if second is None:
                raise DomainError(f"gate {name} takes a control and a target")
            control, target = self.pair(first, second)
            self.instructions.append(
                ControlledGate(control, target, NAMED_CONTROLLED_GATES[name], name)
            )
        else:
            raise DomainError(f"unknown gate {name!r}")

    def set_initial(self, values: list[complex]) -> None:
        if self.initial is not None:
            raise DomainError("initial state given twice")
        if self.instructions:
            raise DomainError("init must precede every instruction")
        if len(values) != 2**self.num_qubits:
            raise DomainError(
                f"init needs {2**self.num_qubits} amplitudes, got {len(values)}"
            )
        state = StateVector(values)
        if state.squared_norm == 0:
            raise DomainError("initial state is the zero vector")
        self.initial = state


def parse_program(text: str) -> CircuitProgram:
    """Parse a circuit file.

    Raises:
        CircuitParseError: Listing every malformed line
    """
    parser = _LineParser()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = " ".join(raw.split("#", 1)[0].split()).lower()
        if not line:
            continue
        try:
            parser.feed(line)
        except (DomainError, ValueError) as e:
            parser.issues.append(ParseIssue(number, str(e)))
    if parser.num_qubits is None and not parser.issues:
        parser.issues.append(ParseIssue(0, "missing 'qubits N' line"))
    if parser.issues:
        for issue in parser.issues:
            logger.debug(f"Parse issue: {issue}")
        raise CircuitParseError(
            f"{len(parser.issues)} problem(s) in circuit", parser.issues
        )
    program = CircuitProgram(
        parser.num_qubits, tuple(parser.instructions), parser.initial
    )
    logger.debug(
        f"Parsed {len(program.instructions)} instructions "
        f"on {program.num_qubits} qubits"
    )
    return program


def _format_matrix(gate: GateU2) -> str:
    rows = (
        ", ".join(format_complex_exact(complex(v)) for v in row) for row in gate.matrix
    )
    return "[" + ", ".join(f"[{row}]" for row in rows) + "]"


def _format_vector(values: np.ndarray) -> str:
    return "[" + ", ".join(format_complex_exact(complex(v)) for v in values) + "]"


def format_instruction(instruction: Instruction) -> str:
    match instruction:
        case Gate1(target, _, name) if name in NAMED_GATES:
            return f"{name} {target}"
        case Gate1(target, gate, _):
            return f"gate1 {target} {_format_matrix(gate)}"
        case ControlledGate(control, target, _, name) if name in NAMED_CONTROLLED_GATES:
            return f"{name} {control} {target}"
        case ControlledGate(control, target, gate, _):
            return f"cgate {control} {target} {_format_matrix(gate)}"
        case Measure(qubit):
            return f"measure {qubit}"
        case MeasureAll():
            return "measure_all"
    raise TypeError(f"Not an instruction: {instruction!r}")


def format_program(program: CircuitProgram) -> str:
    """Render a program in the circuit file format."""
    lines = [f"qubits {program.num_qubits}"]
    if program.initial is not None:
        lines.append(f"init {_format_vector(program.initial.amplitudes)}")
    lines.extend(format_instruction(i) for i in program.instructions)
    return "\n".join(lines) + "\n"
