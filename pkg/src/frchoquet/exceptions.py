class FRChoquetError(Exception):
    """Base class for errors raised by this package."""


class DomainError(FRChoquetError, ValueError):
    """An argument lies outside the unit interval."""


class DataError(FRChoquetError, ValueError):
    """Malformed or invalid input data (bad file, wrong arity, ...)."""


class MeasureError(FRChoquetError, ArithmeticError):
    """A measure or distance cannot be computed on the given data."""
