"""Exception hierarchy shared by every module."""


class SpincurvError(Exception):
    """Base class for all package errors."""


class ConfigurationError(SpincurvError):
    """A chart, scenario or pipeline is set up inconsistently."""


class UsageError(SpincurvError):
    """Bad arguments from a caller (unknown names, invalid parameters)."""


class EvaluationError(SpincurvError):
    """A function could not be evaluated at a probe point."""

    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} at point {tuple(float(v) for v in point)}"
        super().__init__(message)
        self.point = point


class SingularMetricError(EvaluationError):
    """A metric or metric spinor is degenerate."""


class InsufficientOrderError(SpincurvError):
    """Jet data are not deep enough for the requested derivative."""


class InconsistentScenarioError(ConfigurationError):
    """Tetrad and metric disagree, or the signature is wrong."""


class FormalismInconsistencyError(SpincurvError):
    """A quantity that must be real or symmetric is not (broken convention upstream)."""


class PreconditionError(SpincurvError):
    """An operation was requested outside its domain of validity."""


class ExpressionError(ConfigurationError):
    """Scenario expression failed to parse."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column
