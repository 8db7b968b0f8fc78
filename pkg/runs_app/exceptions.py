"""Errors raised while reading, generating or running problems."""

# Local imports
from core.exceptions import InputError, NumericalError


class ParseError(InputError):
    """A Matrix Market file could not be read."""


class NotSymmetricHeader(InputError):
    """The Matrix Market header does not declare a real symmetric matrix."""


class BadParams(InputError):
    """Generator or benchmark parameters are out of range."""


class InvalidReport(NumericalError):
    """A report failed its schema, typically through a non-finite value."""
