"""Errors raised by the small dense kernels."""

# Local imports
from core.exceptions import NumericalError


class NotPositiveDefinite(NumericalError):
    """Cholesky met a non-positive pivot.

    Attributes:
        index (int): Zero-based position of the failing pivot.
    """

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"Matrix is not positive definite (pivot {index}).")


class SingularTriangular(NumericalError):
    """A triangular factor has a negligible diagonal entry."""


class RankDeficient(NumericalError):
    """Cholesky QR could not orthonormalize the block."""
