"""Errors raised by the simulated distributed layer."""

# Local imports
from core.exceptions import BlockEigError, InputError


class EvenNd(InputError):
    """The partition count must be odd."""


class ProtocolDeadlock(BlockEigError):
    """A collective was entered by the wrong set of ranks.

    With real communicators this would hang; here it is reported at once.
    """

    exit_code = 4
