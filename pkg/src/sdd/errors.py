"""Exception types shared across the package."""


class SddError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SddError, ValueError):
    """A point lies outside the support of a measure or basis."""


class ConditioningError(SddError, ArithmeticError):
    """The spline moment matrix is numerically not positive-definite.

    Attributes
    ----------
    pivot_index : int
        Zero-based index of the offending Cholesky pivot.
    pivot_ratio : float
        Pivot value divided by the largest diagonal entry of the matrix.
    """

    def __init__(self, pivot_index, pivot_ratio, threshold):
        self.pivot_index = pivot_index
        self.pivot_ratio = pivot_ratio
        self.threshold = threshold
        super().__init__(
            f"spline moment matrix is ill-conditioned: pivot {pivot_index} has "
            f"relative size {pivot_ratio:.3e} < {threshold:.1e}; coarsen the mesh "
            "or lower the degree"
        )
