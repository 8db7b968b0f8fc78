"""Errors raised by the CSB_Coo format and the SpMM kernels."""

# Local imports
from core.exceptions import InputError


class BlockTooLarge(InputError):
    """A block extent exceeds what 2-byte local indices can address."""


class IndexOutOfRange(InputError):
    """A coordinate lies outside the matrix."""


class DuplicateEntry(InputError):
    """The same (row, col) coordinate was given twice."""


class DimensionMismatch(InputError):
    """Operand shapes do not conform."""


class NotStrictlyLower(InputError):
    """A half-stored symmetric operand holds an entry with row <= col."""


class CacheFormatError(InputError):
    """A binary CSB cache file is truncated or has the wrong magic."""


class InvalidKernelVariant(InputError):
    """Unknown kernel tag or non-positive cache/vector parameters."""
