"""Worker pool used by the kernels, the preconditioner and the ranks."""

# Standard library
import logging
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)


def run_tasks(func, items, workers=1):
    """Apply ``func`` to every item, optionally on a thread pool.

    With ``workers == 1`` the items run in order on the calling thread, so
    results are reproducible bit for bit.

    Args:
        func: Callable taking one item.
        items: Iterable of work items.
        workers (int): Number of threads.

    Returns:
        list: Results in item order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(func, items))
