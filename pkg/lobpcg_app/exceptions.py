"""Errors raised by the LOBPCG driver."""

# Local imports
from core.exceptions import InputError, NumericalError


class InvalidSolverConfig(InputError):
    """Solver parameters are inconsistent with each other or with n."""


class BasisDegenerate(NumericalError):
    """The Gram matrix of the search basis is not positive definite."""


class BreakdownUnrecoverable(NumericalError):
    """Basis repair failed twice in a row."""


class MaxIterReached(NumericalError):
    """The iteration limit was hit before k pairs converged.

    Attributes:
        result (LobpcgResult): Best approximation reached.
    """

    def __init__(self, result, message=None):
        self.result = result
        super().__init__(
            message
            or f"{result.n_converged} of {len(result.eigenvalues)} eigenpairs "
               f"converged after {result.iterations} iterations."
        )
