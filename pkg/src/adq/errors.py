"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


class RangeError(OverflowError):
    """A result cannot be represented in double precision."""


class ConvergenceError(ArithmeticError):
    """A numerical procedure did not reach its tolerance."""
