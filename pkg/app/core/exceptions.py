from typing import Any, Optional


class CohomologyError(Exception):
    """
    Base class for every error raised by the engine.

    Carries a human readable ``detail`` and the process ``exit_code`` the CLI
    reports for it (0 = ok, 1 = assertion failure, 2 = input error, 3 = budget).
    """

    exit_code: int = 2

    def __init__(self, detail: str, *, context: Optional[dict[str, Any]] = None):
        super().__init__(detail)
        self.detail = detail
        self.context = context or {}

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"error": self.detail, "exit_code": self.exit_code}
        if self.context:
            payload["context"] = {k: str(v) for k, v in self.context.items()}
        return payload


# Input errors

class InputParseError(CohomologyError):
    """Malformed input; ``line`` and ``column`` are set only when the JSON text itself is at fault."""

    def __init__(self, detail: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is None:
            super().__init__(detail)
        else:
            super().__init__(f"{detail} (line {line}, column {column})", context={"line": line, "column": column})
        self.line = line
        self.column = column


class DimensionMismatchError(CohomologyError):
    pass


class InvalidCoefficientError(CohomologyError):
    pass


class InvalidFieldError(CohomologyError):
    pass


class InvalidGroupTableError(CohomologyError):
    pass


class CharacteristicConflictError(CohomologyError):
    pass


class StructureMissingError(CohomologyError):
    pass


class FieldMismatchError(CohomologyError):
    pass


class PreconditionError(CohomologyError):
    pass


class UnsupportedHypothesisError(CohomologyError):
    pass


class SkewAntipodeMissingError(UnsupportedHypothesisError):
    pass


class NotInSpanError(CohomologyError):
    pass


# Budget

class BudgetExceededError(CohomologyError):
    exit_code = 3


# Assertion failures: something that is a theorem did not hold

class AssertionFailure(CohomologyError):
    exit_code = 1


class ContainmentViolationError(AssertionFailure):
    pass


class ClosureViolationError(AssertionFailure):
    pass


class DecompositionError(AssertionFailure):
    pass


class ConventionMismatchError(AssertionFailure):
    pass
