"""Deterministic fan-out capped by ``OCCULTIST_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("OCCULTIST_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def ordered_map(fn, items, threads=None):
    """``list(map(fn, items))``, optionally on a thread pool; order kept."""
    items = list(items)
    n = threads if threads is not None else thread_cap()
    if n <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
