"""Ordered map over independent LP solves."""
from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, threads: int = 1) -> list:
    """``[fn(i) for i in items]``, optionally on a thread pool.

    Results always come back in input order, so downstream reductions are
    identical whatever the completion order.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
