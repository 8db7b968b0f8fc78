"""Solver parameters."""

# Standard library
from dataclasses import dataclass, field

# Third-party imports
import numpy as np

# Local imports
from precond_app.fom import FomConfig
from spmm_app.kernels import KernelVariant

from .exceptions import InvalidSolverConfig

DEFAULT_TOL = 1e-6
DEFAULT_MAXITER = 500


@dataclass(frozen=True)
class SolverConfig:
    """Inputs of one LOBPCG run.

    Attributes:
        k (int): Number of sought eigenpairs.
        nb (int or None): Block width, ``k + 3`` when omitted.
        tol (float): Relative residual tolerance.
        maxiter (int): Iteration limit.
        fom (FomConfig): Preconditioner step count.
        variant (KernelVariant): SpMM kernel used by CSB operators.
        seed (int or None): Seed of the random initial block.
        workers (int): Thread count for the preconditioner.
    """

    k: int
    nb: int = None
    tol: float = DEFAULT_TOL
    maxiter: int = DEFAULT_MAXITER
    fom: FomConfig = field(default_factory=FomConfig)
    variant: KernelVariant = field(default_factory=KernelVariant)
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.nb is None:
            object.__setattr__(self, 'nb', self.k + 3)
        if self.k < 1:
            raise InvalidSolverConfig(f"k must be at least 1, got {self.k}.")
        if self.nb < self.k:
            raise InvalidSolverConfig(f"Block width {self.nb} is smaller than k={self.k}.")
        if not (np.isfinite(self.tol) and self.tol > 0):
            raise InvalidSolverConfig(f"Tolerance must be positive, got {self.tol}.")
        if self.maxiter < 1:
            raise InvalidSolverConfig(f"maxiter must be at least 1, got {self.maxiter}.")
        if self.workers < 1:
            raise InvalidSolverConfig(f"workers must be at least 1, got {self.workers}.")

    def check_dimension(self, n):
        """Raise InvalidSolverConfig unless ``3 * nb <= n``."""
        if 3 * self.nb > n:
            raise InvalidSolverConfig(
                f"Block width {self.nb} needs n >= {3 * self.nb}, matrix has n={n}."
            )
