"""Process-pool fan-out for region sweeps and Monte Carlo chunks.

Jobs are plain tuples of picklable arguments for a top-level function.
Results come back in submission order no matter which worker finishes
first, so callers can merge them deterministically.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _worker_init() -> None:
    try:
        from .log import setup_logging

        setup_logging("workers")
    except Exception:
        pass


def parallel_map(fn: Callable[..., T], jobs: Sequence[tuple[Any, ...]], workers: int = 1) -> list[T]:
    """Apply ``fn(*job)`` to every job; inline when ``workers == 1``."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]

    results: dict[int, T] = {}
    pool: ProcessPoolExecutor | None = None
    try:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs)), initializer=_worker_init) as pool:
            futures = {pool.submit(fn, *job): index for index, job in enumerate(jobs)}
            for future in as_completed(futures):
                results[futures[future]] = future.result()
    except KeyboardInterrupt:
        logger.warning("interrupted; cancelling %d pending jobs", len(jobs) - len(results))
        if pool is not None:
            pool.shutdown(wait=False, cancel_futures=True)
        raise
    logger.debug("parallel_map %s: %d jobs on %d workers", getattr(fn, "__name__", fn), len(jobs), workers)
    return [results[index] for index in sorted(results)]


__all__ = ["parallel_map"]
