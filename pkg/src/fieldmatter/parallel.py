"""Order-preserving process-pool map."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, items, workers=1):
    """``list(map(fn, items))``, optionally over ``workers`` processes.

    Results come back in input order, so any later reduction is deterministic
    and independent of the worker count.
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
