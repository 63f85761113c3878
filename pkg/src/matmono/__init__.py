"""Primary matrix functions, their Fréchet derivatives, and monotonicity checks
for matrix maps and Hencky-type stress responses."""

from .exceptions import (
    ConfigurationError,
    DomainError,
    HypothesisFailure,
    MatMonoError,
    NumericalError,
    PreconditionError,
    ShapeError,
)
from .operator import SymOperator
from .primfn import ScalarFunction, apply_primary, frechet, frechet_apply, get_function
from .symcore import eig, sym_basis

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "HypothesisFailure",
    "MatMonoError",
    "NumericalError",
    "PreconditionError",
    "ShapeError",
    "ScalarFunction",
    "SymOperator",
    "apply_primary",
    "eig",
    "frechet",
    "frechet_apply",
    "get_function",
    "sym_basis",
]
