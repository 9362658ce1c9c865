"""Exception types shared across the package."""


class BergmanLabError(Exception):
    """Base class for all package errors."""


class ParameterError(BergmanLabError, ValueError):
    """A parameter is outside its admissible range."""


class AdmissibilityError(ParameterError):
    """A weight profile fails the admissibility conditions."""


class NumericalError(BergmanLabError, ArithmeticError):
    """A numerical computation produced a non-finite or invalid result."""


class ConstructionError(BergmanLabError, RuntimeError):
    """An internal construction failed its own audit (a bug, not bad input)."""
