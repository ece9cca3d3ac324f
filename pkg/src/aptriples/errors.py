"""Exception types shared across the package."""


class AptriplesError(Exception):
    """Base class for all package errors."""


class DomainError(AptriplesError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class CapacityError(AptriplesError):
    """A configured memory or node budget would be exceeded."""


class InsufficientTableError(AptriplesError):
    """A prime table is too small to finish a factorization."""


class AmbiguityError(AptriplesError):
    """Interval certification could not separate a value from an integer.

    Carries the two candidate floors.
    """

    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = candidates


class ConstraintViolationError(AptriplesError):
    """A parameter constraint failed; the message names the inequality."""


class AccuracyError(AptriplesError):
    """A quadrature failed to reach the requested accuracy.

    Carries the accuracy actually achieved.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PoleError(AptriplesError, ZeroDivisionError):
    """Evaluation requested exactly at a pole."""
