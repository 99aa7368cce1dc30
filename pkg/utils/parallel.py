"""
Chunked grid evaluation with a fixed reduction order.

Points are cut into blocks of ``settings.chunk_size`` no matter how many
workers run, so every block is computed by the same numpy calls and results
are bit-identical for any ``jobs``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

from core.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")


def resolve_jobs(jobs: Optional[int]) -> int:
    return max(1, int(jobs if jobs is not None else settings.jobs))


def chunks(points: np.ndarray, chunk_size: Optional[int] = None) -> List[np.ndarray]:
    size = chunk_size or settings.chunk_size
    return [points[i : i + size] for i in range(0, len(points), size)] or [points[:0]]


def map_chunks(
    fn: Callable[[np.ndarray], T],
    points: np.ndarray,
    jobs: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> List[T]:
    """Apply ``fn`` to each block of points; results come back in block order."""
    blocks = chunks(points, chunk_size)
    workers = min(resolve_jobs(jobs), len(blocks))
    if workers <= 1:
        return [fn(block) for block in blocks]
    logger.debug("evaluating %d blocks on %d workers", len(blocks), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, blocks))


def map_ordered(fn: Callable[[T], object], items: Sequence[T], jobs: Optional[int] = None) -> list:
    workers = min(resolve_jobs(jobs), max(1, len(items)))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def pairwise_sum(values) -> float:
    """Sum adjacent pairs level by level over the flattened array."""
    level = np.asarray(values, dtype=float).ravel()
    if level.size == 0:
        return 0.0
    while level.size > 1:
        if level.size % 2:
            level = np.append(level, 0.0)
        level = level[0::2] + level[1::2]
    return float(level[0])
