"""Shared helpers: RNG coercion and order-preserving parallel mapping."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def ensure_rng(rng: "np.random.Generator | int | None") -> np.random.Generator:
    """Coerce an integer seed (or None) into a numpy Generator (PCG64)."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """Map ``fn`` over ``items``, optionally on a thread pool.

    Results always come back in input order, so the output is identical
    for any thread count. Tasks must not draw from a shared RNG; callers
    derive one substream per task before dispatch.
    """
    seq = list(items)
    if threads <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, seq))
