"""Order-preserving thread pool map.

The compiled kernel releases the GIL, so threads give real speed-up for
cubature over many sample points.  Results come back in input order, so the
output does not depend on the thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def default_threads():
    try:
        return max(1, int(os.environ.get("ELLIPSTONE_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items, threads=None):
    items = list(items)
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
