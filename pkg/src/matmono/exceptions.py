"""Exception hierarchy shared by all modules."""


class MatMonoError(Exception):
    """Base class for errors raised by matmono."""


class ShapeError(MatMonoError, ValueError):
    """Operands have incompatible or unsupported shapes."""


class DomainError(MatMonoError, ValueError):
    """An argument lies outside the domain of a (matrix) function.

    ``value`` holds the offending eigenvalue (or ``None`` when not scalar).
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class ConfigurationError(MatMonoError, ValueError):
    """Invalid parameters, unknown names or missing registry data."""


class PreconditionError(MatMonoError, ValueError):
    """A documented precondition of an operation does not hold."""


class NumericalError(MatMonoError, ArithmeticError):
    """An iterative kernel failed or a numerical certificate was violated."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class HypothesisFailure(MatMonoError):
    """A lemma was asked to produce a verdict outside its hypotheses.

    ``report`` carries the measured quantities that failed.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}
