"""Bounded worker-thread fan-out with index-addressed results."""

import logging
from collections.abc import Callable

import anyio
import numpy as np
from anyio import to_thread

__all__ = ["ProgressCallback", "chunk_bounds", "map_indexed", "rng_for"]

logger = logging.getLogger(__name__)

type ProgressCallback = Callable[[int, int], None]


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for (seed, key); equal keys give bit-identical streams."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))


def chunk_bounds(n: int, n_chunks: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into at most ``n_chunks`` contiguous, nearly equal ``(start, stop)`` slices."""
    n_chunks = max(1, min(n_chunks, n))
    edges = [round(k * n / n_chunks) for k in range(n_chunks + 1)]
    return [(a, b) for a, b in zip(edges[:-1], edges[1:], strict=True) if b > a]


async def map_indexed(
    fn: Callable[[int], None],
    n_tasks: int,
    *,
    workers: int,
    on_progress: ProgressCallback | None = None,
) -> None:
    """Run ``fn(0) .. fn(n_tasks - 1)`` on at most ``workers`` threads.

    Each call must write only to its own slice of a preallocated output, so the combined
    result does not depend on scheduling order. ``on_progress(done, total)`` is called on
    the event-loop thread after each task finishes.

    Raises:
        BaseException: The first exception raised by a task, unwrapped from the task group.
    """
    limiter = anyio.CapacityLimiter(max(1, workers))
    done = 0

    async def run_one(index: int) -> None:
        nonlocal done
        await to_thread.run_sync(fn, index, limiter=limiter)
        done += 1
        if on_progress is not None:
            on_progress(done, n_tasks)

    try:
        async with anyio.create_task_group() as tg:
            for index in range(n_tasks):
                tg.start_soon(run_one, index)
    except BaseExceptionGroup as group:
        # Callers see the first worker failure, not the group
        first: BaseException = group
        while isinstance(first, BaseExceptionGroup):
            first = first.exceptions[0]
        raise first from None
    logger.debug("Completed %d tasks on %d workers", n_tasks, workers)
