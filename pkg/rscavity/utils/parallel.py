# rscavity/utils/parallel.py

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar

import numpy as np

from .config import get_settings
from .rng import Key, substream

T = TypeVar("T")
R = TypeVar("R")

# Sample sweeps are cut into fixed chunks, each with its own substream,
# so the concatenated output never depends on the number of workers.
CHUNK_SIZE = 1 << 16


def resolve_threads(threads: Optional[int]) -> int:
    return max(1, threads if threads is not None else get_settings().threads)


def map_ordered(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """``[fn(x) for x in items]``, fanned out over a thread pool, results in input order."""
    items = list(items)
    workers = resolve_threads(threads)
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def chunk_bounds(total: int, chunk: int = CHUNK_SIZE) -> List[Tuple[int, int, int]]:
    """(chunk index, start, stop) triples covering ``range(total)``."""
    return [(i, start, min(start + chunk, total)) for i, start in enumerate(range(0, total, chunk))]


def chunked_map(
    total: int,
    seed: int,
    key: Tuple[Key, ...],
    fn: Callable[[np.random.Generator, int], R],
    threads: Optional[int] = None,
) -> List[R]:
    """
    Run ``fn(rng, size)`` on every chunk of a ``total``-sample sweep.

    Chunk ``i`` draws from ``substream(seed, *key, i)``.
    """
    def run(bounds: Tuple[int, int, int]) -> R:
        index, start, stop = bounds
        return fn(substream(seed, *key, index), stop - start)

    return map_ordered(run, chunk_bounds(total), threads)


def chunked_samples(
    total: int,
    seed: int,
    key: Tuple[Key, ...],
    fn: Callable[[np.random.Generator, int], np.ndarray],
    threads: Optional[int] = None,
) -> np.ndarray:
    parts = chunked_map(total, seed, key, fn, threads)
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.float64)
