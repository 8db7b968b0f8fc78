"""Base error type shared by every blockeig app."""


class BlockEigError(Exception):
    """Root of all domain errors raised by the blockeig apps.

    Attributes:
        exit_code (int): Process exit code used by the management commands
            when the error escapes a command (3 input, 4 numerical).
    """

    exit_code = 3


class InputError(BlockEigError):
    """Bad input data or parameters."""

    exit_code = 3


class NumericalError(BlockEigError):
    """A numerical procedure could not produce a valid result."""

    exit_code = 4
