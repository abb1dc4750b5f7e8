"""Exact and numerical tools for the two-parameter deformed Fock space and its Gaussian."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    InexactDivisionError,
    QTFockError,
    ResourceLimitError,
    RootFindingError,
    TruncationError,
    ValidationError,
)
from .poly import ONE, Q, T, ZERO, BivarPoly  # noqa: E402

__all__ = [
    "__version__",
    "BivarPoly",
    "Q",
    "T",
    "ONE",
    "ZERO",
    "QTFockError",
    "ValidationError",
    "DomainError",
    "ResourceLimitError",
    "TruncationError",
    "RootFindingError",
    "InexactDivisionError",
]
