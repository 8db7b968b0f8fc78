"""Symmetric operators the solver can apply to a block."""

# Standard library
import logging

# Local imports
from densela_app.dense import gram
from spmm_app.blockvector import BlockVector, as_array
from spmm_app.exceptions import DimensionMismatch
from spmm_app.kernels import apply_symmetric

logger = logging.getLogger(__name__)


class SymmetricOperator:
    """Base class: ``op(W)`` returns ``H @ W`` and counts the call.

    Subclasses implement :meth:`apply`. :meth:`gram` may be overridden by
    operators whose vectors live distributed, so that projected matrices are
    reduced the same way the products are.

    Attributes:
        n (int): Operator dimension.
        calls (int): Number of applications so far.
    """

    def __init__(self, n):
        self.n = int(n)
        self.calls = 0

    def __call__(self, W):
        w = as_array(W)
        if w.shape[0] != self.n:
            raise DimensionMismatch(f"Operator of size {self.n} applied to {w.shape} block.")
        self.calls += 1
        return BlockVector(self.apply(w))

    def apply(self, W):
        raise NotImplementedError

    def gram(self, A, B):
        return gram(A, B)

    def describe(self):
        """Short label for the run report."""
        return type(self).__name__


class CallbackOperator(SymmetricOperator):
    """Wraps a plain ``W -> H @ W`` callable."""

    def __init__(self, n, func):
        super().__init__(n)
        self.func = func

    def apply(self, W):
        return as_array(self.func(W))


class CsbSymmetricOperator(SymmetricOperator):
    """``L + L.T + diag(D)`` applied through the CSB_Coo kernels.

    Attributes:
        L (CsbCooMatrix): Strictly lower triangle.
        D (np.ndarray): Diagonal.
        variant (KernelVariant): Kernel strategy.
        workers (int): Thread count.
    """

    def __init__(self, L, D, variant=None, workers=1):
        super().__init__(L.nrows)
        self.L = L
        self.D = D
        self.variant = variant
        self.workers = workers

    def apply(self, W):
        return apply_symmetric(self.L, self.D, W, self.variant, self.workers).data

    def describe(self):
        label = self.variant.label() if self.variant else 'Baseline'
        return f"csb[{label}]"


def as_operator(operator, n=None):
    """Return ``operator`` as a SymmetricOperator.

    Args:
        operator: SymmetricOperator or a callable.
        n (int or None): Dimension, required for plain callables.

    Returns:
        SymmetricOperator: The wrapped operator.
    """
    if isinstance(operator, SymmetricOperator):
        return operator
    if n is None:
        raise DimensionMismatch("A callable operator needs its dimension.")
    return CallbackOperator(n, operator)
