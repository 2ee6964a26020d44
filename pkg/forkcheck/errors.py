"""Exceptions raised by forkcheck. All bad-input errors are ValueErrors."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from forkcheck.models import SpecViolation, WellFormednessViolation


class ForkcheckError(ValueError):
    """Base class for input errors."""


class MalformedHistoryError(ForkcheckError):
    def __init__(self, violation: WellFormednessViolation):
        super().__init__(f"malformed history: {violation.describe()}")
        self.violation = violation


class SpecViolationError(ForkcheckError):
    """A checker precondition (unique writes, single writer) does not hold."""

    def __init__(self, violation: SpecViolation):
        super().__init__(f"register specification violated: {violation.describe()}")
        self.violation = violation


class TraceFormatError(ForkcheckError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ScenarioError(ForkcheckError):
    pass


class SimulationConfigError(ForkcheckError):
    pass


class HarnessError(RuntimeError):
    """An internal construction broke its own contract.

    Raised when the simulated attack diverges from the execution it reproduces
    or when a passing witness fails re-validation.
    """


class BudgetExceeded(Exception):
    """Internal to the witness search; surfaces as an inconclusive verdict."""
