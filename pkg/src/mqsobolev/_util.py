"""Small shared helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_ENV_THREADS = "MQSOBOLEV_THREADS"


def worker_count() -> int:
    """Worker cap from the environment; defaults to 1 (serial)."""
    raw = os.environ.get(_ENV_THREADS, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def map_chunked(fn, n_items: int, chunk: int = 256):
    """Apply ``fn(start, stop)`` over chunks of range(n_items).

    Runs chunks on a thread pool when the worker cap allows; chunk results
    must be written to disjoint output slices by ``fn`` itself, so the order
    of execution cannot affect the result.
    """
    spans = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    workers = worker_count()
    if workers <= 1 or len(spans) <= 1:
        for s, e in spans:
            fn(s, e)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(lambda se: fn(*se), spans))
