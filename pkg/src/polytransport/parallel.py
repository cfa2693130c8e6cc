"""Chunked evaluation over rows of a point array.

Chunk boundaries depend only on the number of rows, never on the worker
count, so results are bit-identical for any ``threads`` value.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK_ROWS = 1024


def map_rows(fn, points: np.ndarray, threads: int = 1, chunk: int = CHUNK_ROWS) -> np.ndarray:
    n = points.shape[0]
    if n <= chunk:
        return fn(points)
    bounds = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
    if threads <= 1:
        parts = [fn(points[a:b]) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda ab: fn(points[ab[0] : ab[1]]), bounds))
    return np.concatenate(parts, axis=0)
