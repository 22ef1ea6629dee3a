"""Exception types raised by the emulator."""

from dataclasses import dataclass


class EmulatorError(ValueError):
    """Base class for all emulator errors."""


class DomainError(EmulatorError):
    """Raised when an argument lies outside an operation's domain.

    Covers bad qubit indices, dimension or layout mismatches, zero vectors
    and matrices that are not positive semi-definite.
    """


class ConfigurationError(EmulatorError):
    """Raised for inconsistent run settings (aliasing, bad config files)."""


class RejectedGateError(DomainError):
    """Raised when a gate matrix fails the unitarity tolerance."""

    def __init__(self, message: str, unitarity_error: float, tolerance: float):
        super().__init__(message)
        self.unitarity_error = unitarity_error
        self.tolerance = tolerance


class DegenerateStateError(DomainError):
    """Raised when a measurement is attempted on a zero-power signal."""


@dataclass(frozen=True)
class ParseIssue:
    """A single problem found while parsing a circuit file.

    Args:
        line: 1-based line number in the circuit text
        message: Human-readable description of the problem
    """

    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class CircuitParseError(EmulatorError):
    """Raised when circuit text is malformed; carries every issue found."""

    def __init__(self, message: str, issues: list[ParseIssue] | None = None):
        super().__init__(message)
        self.issues = issues or []
