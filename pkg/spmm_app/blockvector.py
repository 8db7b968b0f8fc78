"""Row-major multivector used as SpMM input and output."""

# Third-party imports
import numpy as np

# Local imports
from .exceptions import DimensionMismatch


class BlockVector:
    """An ``nrows x nvec`` block of vectors stored row-major.

    All ``nvec`` components of row ``r`` are contiguous, so element
    ``(r, v)`` lives at flat offset ``r * nvec + v``.

    Attributes:
        data (np.ndarray): C-contiguous float64 array of shape
            ``(nrows, nvec)``.
    """

    __slots__ = ('data',)

    def __init__(self, data):
        array = np.ascontiguousarray(data, dtype=np.float64)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        if array.ndim != 2:
            raise DimensionMismatch(
                f"BlockVector needs a 2-D array, got {array.ndim} dimensions."
            )
        self.data = array

    @classmethod
    def zeros(cls, nrows, nvec):
        """Return an all-zero block."""
        return cls(np.zeros((nrows, nvec)))

    @classmethod
    def random(cls, nrows, nvec, seed=None):
        """Return a block with entries uniform in [-1, 1].

        Args:
            nrows (int): Row count.
            nvec (int): Column count.
            seed (int or None): Seed for ``numpy.random.default_rng``.

        Returns:
            BlockVector: New random block.
        """
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(-1.0, 1.0, size=(nrows, nvec)))

    @property
    def nrows(self):
        return self.data.shape[0]

    @property
    def nvec(self):
        return self.data.shape[1]

    @property
    def flat(self):
        """Row-major flat view of the storage."""
        return self.data.reshape(-1)

    def copy(self):
        return BlockVector(self.data.copy())

    def __repr__(self):
        return f"BlockVector(nrows={self.nrows}, nvec={self.nvec})"


def as_array(block):
    """Return the ndarray behind a BlockVector, or the array itself.

    Args:
        block: BlockVector or array-like.

    Returns:
        np.ndarray: 2-D float64 array (a view when possible).
    """
    if isinstance(block, BlockVector):
        return block.data
    array = np.asarray(block, dtype=np.float64)
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    return array
