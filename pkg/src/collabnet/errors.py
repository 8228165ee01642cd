"""Exception hierarchy shared by every module."""


class CollabnetError(Exception):
    """Base class for all errors raised by the toolkit."""


class IdentifierError(CollabnetError, KeyError):
    """An id, attribute or covariate name does not resolve."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DuplicateIdentifierError(IdentifierError):
    pass


class DataError(CollabnetError, ValueError):
    """Malformed input data (parse failures, bad shapes, bad values)."""


class ShapeError(DataError):
    pass


class DegenerateInputError(CollabnetError, ValueError):
    """The input is valid but too small or too uniform for the computation."""


class SpecError(CollabnetError, ValueError):
    """Invalid generator specification."""


class ConfigError(CollabnetError, ValueError):
    """Invalid or inconsistent run configuration."""


class NumericalError(CollabnetError, ArithmeticError):
    """Base for fitting failures."""


class ConvergenceError(NumericalError):
    pass


class SeparationError(NumericalError):
    """Coefficients diverge because the outcome is (quasi-)perfectly separated."""


class RankDeficiencyError(NumericalError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"design matrix is rank deficient at column {column!r}")
