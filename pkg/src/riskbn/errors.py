"""Exception hierarchy shared across the package."""

from __future__ import annotations


class RiskBnError(Exception):
    """Base class for all errors raised by riskbn."""


# --- network structure ------------------------------------------------------

class DuplicateNodeError(RiskBnError):
    pass


class UnknownNodeError(RiskBnError):
    pass


class CycleDetectedError(RiskBnError):
    """Raised when an edge would close a directed cycle.

    ``path`` names the offending node sequence, ending where it started.
    """

    def __init__(self, path: list[str]):
        self.path = list(path)
        super().__init__("cycle detected: " + " -> ".join(self.path))


class UnknownParentReferenceError(RiskBnError):
    pass


class MalformedTableError(RiskBnError):
    pass


class ValidationFailedError(RiskBnError):
    pass


class GridOverflowError(RiskBnError):
    pass


# --- expression language ----------------------------------------------------

class ExpressionError(RiskBnError):
    pass


class ExpressionSyntaxError(ExpressionError):
    """Syntax error with a 1-based character position."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class UnknownFunctionError(ExpressionError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown function {name!r} (at position {position})")


class ArityError(ExpressionError):
    pass


class UnboundParentError(ExpressionError):
    pass


class DomainError(ExpressionError):
    pass


# --- inference --------------------------------------------------------------

class InconsistentEvidenceError(RiskBnError):
    pass


class StateSpaceTooLargeError(RiskBnError):
    pass


# --- risk model -------------------------------------------------------------

class MissingCriteriaError(RiskBnError):
    pass


class NoHazardEvidenceError(RiskBnError):
    pass


class WeightOutOfRangeError(RiskBnError):
    pass


class NoOccurrencesError(RiskBnError):
    pass


class RankOutOfRangeError(RiskBnError):
    pass


class EmptyInputError(RiskBnError):
    pass


class NameCollisionError(RiskBnError):
    pass


class InvalidAttachmentPointError(RiskBnError):
    pass


# --- scenario files ---------------------------------------------------------

class ScenarioError(RiskBnError):
    """Scenario file problem, carrying the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ScenarioSyntaxError(ScenarioError):
    pass


class ScenarioSchemaError(ScenarioError):
    pass


class InvalidOverrideError(RiskBnError):
    pass
