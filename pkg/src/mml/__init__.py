"""Matrix means on positive definite matrices and numerical checks of their order relations."""

from . import linalg, majorization, means, twobytwo
from .errors import (
    CatalogError,
    ConditioningError,
    ConvergenceFailure,
    DegenerateError,
    DomainError,
    IoError,
    MMLError,
    RangeError,
    SizeError,
    SpecError,
)
from .means import MeanSpec, ScalarMonotoneFn, mean_apply

__version__ = "0.1.0"

__all__ = [
    "CatalogError",
    "ConditioningError",
    "ConvergenceFailure",
    "DegenerateError",
    "DomainError",
    "IoError",
    "MMLError",
    "MeanSpec",
    "RangeError",
    "ScalarMonotoneFn",
    "SizeError",
    "SpecError",
    "linalg",
    "majorization",
    "mean_apply",
    "means",
    "twobytwo",
]
