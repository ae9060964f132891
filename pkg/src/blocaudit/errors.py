"""Exception hierarchy.

Split along the CLI's exit-code contract: InputError covers anything wrong
with what the user handed us (exit 2), ComputationError covers refusals and
failures inside an otherwise valid computation (exit 3).
"""

from __future__ import annotations


class BlocauditError(Exception):
    """Base class for all package errors."""


class InputError(BlocauditError):
    """Bad input: files, selections, or arguments that violate a contract."""


class ParseError(InputError):
    """Malformed election file. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(InputError, ValueError):
    """A criterion checker was handed a selection that breaks its precondition."""


class ComputationError(BlocauditError):
    """The computation itself failed or was refused."""


class MeekNonConvergenceError(ComputationError):
    """Meek keep-factor iteration did not converge."""

    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(
            f"Meek tabulation did not converge within {iterations} iterations"
        )


class EnumerationGuardError(ComputationError):
    """Committee enumeration refused: too many candidates."""


class OracleBudgetError(ComputationError):
    """Exhaustive removal enumeration refused: too many removal vectors."""
