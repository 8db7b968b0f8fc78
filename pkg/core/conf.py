"""Access to the BLOCKEIG settings dict."""

# Third-party imports
from django.conf import settings


def blockeig_setting(name):
    """Return one value from ``settings.BLOCKEIG``.

    Args:
        name (str): Key such as ``'THREADS'`` or ``'BLOCK_SIZE'``.

    Returns:
        The configured value.
    """
    return settings.BLOCKEIG[name]


def resolve_threads(threads=None):
    """Return the worker count: explicit flag first, then BLOCKEIG_THREADS.

    Args:
        threads (int or None): Value given on the command line.

    Returns:
        int: Worker count, at least 1.
    """
    if threads is None:
        threads = blockeig_setting('THREADS')
    return max(1, int(threads))
