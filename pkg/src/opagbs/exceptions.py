"""Exception types raised across the package."""


class UnphysicalStateError(ValueError):
    """Covariance matrix violates the uncertainty principle."""


class NumericalError(ArithmeticError):
    """A matrix that must be invertible is too ill-conditioned to use."""


class ResourceLimitError(RuntimeError):
    """A combinatorial guard (matrix size, photon budget, grid size) was exceeded."""
