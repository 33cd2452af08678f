"""Exception hierarchy.

Each failure class gets its own type so callers (and tests) can tell a
phase-discipline bug from a sparsity-budget violation from a shape error.
"""


class ThmvError(Exception):
    """Base class for all package errors."""


class CarrierError(ThmvError):
    """A value is not an element of the semiring's carrier."""


class SemiringOverflowError(ThmvError):
    """A natural-semiring result exceeded the 64-bit counter width."""


class DimensionError(ThmvError):
    """Operand shapes are incompatible."""


class BudgetError(ThmvError):
    """A sparse object exceeds its nonzero budget in strict mode."""


class PhaseError(ThmvError):
    """An oracle phase was entered out of order."""


class CapError(ThmvError):
    """A materialization would exceed the desk-scale row cap."""


class FormatError(ThmvError):
    """An instance file does not parse."""


class FitError(ThmvError):
    """Exponent-fit samples are insufficient or degenerate."""
