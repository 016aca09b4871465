"""Exception types shared across the package.

The CLI maps each class onto a process exit code, so the hierarchy is
intentionally flat.
"""


class FloorsumError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class DomainError(FloorsumError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class CapacityError(FloorsumError, MemoryError):
    """A table or guard limit would be exceeded."""

    exit_code = 3


class PrecisionError(FloorsumError, ArithmeticError):
    """A requested error tolerance cannot be met with the configured effort."""

    exit_code = 2


class InsufficientDataError(FloorsumError):
    exit_code = 4


class VerificationError(FloorsumError, AssertionError):
    """A hard identity or inequality failed."""

    exit_code = 1
