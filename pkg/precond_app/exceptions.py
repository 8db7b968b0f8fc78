"""Errors raised by the diagonal-tile preconditioner."""

# Local imports
from core.exceptions import InputError, NumericalError


class MisalignedTiles(InputError):
    """A tile straddles a diagonal block boundary."""


class InvalidTiles(InputError):
    """Tile offsets are not strictly increasing from 0 to n."""


class SingularProjection(NumericalError):
    """The projected tridiagonal system has a negligible pivot."""


class InvalidFomConfig(InputError):
    """FOM step count or shifts out of range."""
