#!/usr/bin/env python3
"""
Deterministic seed schedule and a small thread-pool map.

Sample i of a run seeded with s always uses seed s XOR i, so results do not
depend on how the work is chunked across threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from .config import get_settings

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

T = TypeVar("T")
R = TypeVar("R")


def derive_seed(seed: int, index: int) -> int:
    return (int(seed) ^ int(index)) & MASK64


def rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, index))


def chunk_ranges(total: int, chunks: int) -> List[range]:
    """Split range(total) into at most `chunks` contiguous ranges"""
    chunks = max(1, min(chunks, total)) if total > 0 else 1
    bounds = np.linspace(0, total, chunks + 1).astype(int)
    return [range(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def parallel_map(func: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> List[R]:
    """Map func over items, preserving order; threads defaults to QPROG_THREADS"""
    threads = threads or get_settings().threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Dispatching {len(items)} work items on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
