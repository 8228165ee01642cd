"""Deterministic replicate streams and an order-preserving thread map."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

T = TypeVar("T")


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for replicate ``index``; depends only on ``(seed, index)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def map_replicates(fn: Callable[[int], T], count: int, threads: int = 1) -> list[T]:
    """``[fn(0), ..., fn(count - 1)]``, optionally spread over worker threads.

    Each replicate owns its random stream, so the result does not depend on
    ``threads``.
    """
    if threads is None or threads <= 1 or count < 2:
        return [fn(r) for r in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count), chunksize=max(1, count // (4 * threads))))
