"""Exception types shared across the package."""


class LographError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(LographError, ValueError):
    """Input violates a structural precondition (shape, symmetry, sign, finiteness)."""


class NumericalError(LographError, ArithmeticError):
    """A numerical routine broke down (SVD failure, non-finite iterates, zero energy)."""
