"""Bounded worker pool with order-preserving results."""

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigurationError


def worker_count(requested=None):
    """Pool size: explicit request, else ``QUENCHLAB_WORKERS``, else CPU count."""
    if requested is None:
        env = os.environ.get("QUENCHLAB_WORKERS")
        if env:
            try:
                requested = int(env)
            except ValueError:
                raise ConfigurationError(f"QUENCHLAB_WORKERS must be an integer, got {env!r}") from None
        else:
            requested = os.cpu_count() or 1
    if requested < 1:
        raise ConfigurationError(f"worker count must be >= 1, got {requested}")
    return requested


def ordered_map(fn, items, workers=None):
    """``[fn(x) for x in items]`` evaluated on a thread pool; output order is input order."""
    items = list(items)
    n = min(worker_count(workers), max(len(items), 1))
    if n == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
