"""Exception hierarchy shared by every module."""


class QTFockError(Exception):
    """Base class for all library errors."""


class ValidationError(QTFockError, ValueError):
    """Invalid argument or parameter combination."""


class DomainError(ValidationError):
    """Parameters outside the region where a formula is defined."""


class ResourceLimitError(QTFockError, RuntimeError):
    """An enumeration or dense construction would exceed the configured guard."""


class TruncationError(QTFockError):
    """A computation would leave the retained levels of a truncated Fock space."""


class RootFindingError(QTFockError, RuntimeError):
    """A zero could not be bracketed or refined."""


class InexactDivisionError(QTFockError, ArithmeticError):
    """Polynomial division that was expected to be exact left a remainder."""
