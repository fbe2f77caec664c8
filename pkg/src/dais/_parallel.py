"""Deterministic chunked evaluation over sample rows.

Rows are split into chunks of a fixed size that does not depend on the
number of workers, so every chunk is computed identically whether it runs
serially or on a thread pool.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK_ROWS = 8192
THREADS_ENV = "DAIS_NUM_THREADS"


def default_threads():
    value = os.environ.get(THREADS_ENV, "")
    try:
        n = int(value)
    except ValueError:
        return 1
    return max(n, 1)


def resolve_threads(n_threads):
    return default_threads() if n_threads is None else max(int(n_threads), 1)


def chunk_bounds(n_rows, chunk=CHUNK_ROWS):
    return [(lo, min(lo + chunk, n_rows)) for lo in range(0, n_rows, chunk)]


def map_chunks(func, n_rows, n_threads=None):
    """Apply ``func(lo, hi)`` to each fixed chunk and return results in order."""
    bounds = chunk_bounds(n_rows)
    n_threads = resolve_threads(n_threads)
    if n_threads == 1 or len(bounds) == 1:
        return [func(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(lambda b: func(*b), bounds))


def concat(parts):
    return np.concatenate(parts, axis=0)
