"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An input parameter is outside its admissible range."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class RegimeError(ValueError):
    """The operation needs subcritical parameters."""


class NumericError(ArithmeticError):
    """A root bracket or iteration failed."""


class InfiniteMassError(ValueError):
    """The requested window carries infinite intensity mass."""


class ProjectionRangeError(ValueError):
    """A position lies left of the cell of vertex 1."""


class UsageError(ValueError):
    """A documented precondition of an operation was violated."""


class InfeasibleError(ValueError):
    """A requested probability exceeds the available conditional probability."""


class CalibrationError(RuntimeError):
    """Monte Carlo calibration could not satisfy its conditions."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
