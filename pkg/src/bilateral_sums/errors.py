"""Exception hierarchy shared by all modules."""

from .numerics import PoleError


class NumericFailure(ArithmeticError):
    """A numeric routine could not reach the requested accuracy."""


class NonConvergenceError(NumericFailure):
    pass


class PrecisionExhausted(NumericFailure):
    pass


class StepUnderflow(NumericFailure):
    pass


class IllConditioned(NumericFailure):
    pass


class ExtrapolationInstability(NumericFailure):
    pass


class IdentificationError(ValueError):
    """Numbers were computed but could not be matched to exact values."""


class CatalogError(ValueError):
    pass


__all__ = [
    "PoleError", "NumericFailure", "NonConvergenceError", "PrecisionExhausted",
    "StepUnderflow", "IllConditioned", "ExtrapolationInstability",
    "IdentificationError", "CatalogError",
]
