"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument violates a documented precondition."""


class RangeGuardError(OverflowError):
    """A complex exponential would leave floating-point range."""


class UnsupportedDegree(ValueError):
    """A polynomial degree exceeds the differentiation-noise guard."""


class BasisMismatch(ValueError):
    """Operands carry different spectral-basis tags."""
