from collections.abc import Callable, Sequence
from typing import TypeVar

import anyio
import anyio.to_thread

from app.config import get_settings

T = TypeVar("T")
R = TypeVar("R")


async def _gather(func: Callable[[T], R], items: Sequence[T], threads: int) -> list[R]:
    results: list[R | None] = [None] * len(items)
    limiter = anyio.CapacityLimiter(threads)

    async def run_one(index: int, item: T) -> None:
        results[index] = await anyio.to_thread.run_sync(func, item, limiter=limiter)

    async with anyio.create_task_group() as tg:
        for index, item in enumerate(items):
            tg.start_soon(run_one, index, item)

    return results  # type: ignore[return-value]


def map_concurrently(func: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """
    Apply `func` to every item in worker threads and return results in input order.

    The first exception raised by any call propagates (wrapped in an
    ExceptionGroup by the task group, unwrapped here when it is alone).
    """
    threads = threads or get_settings().threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    try:
        return anyio.run(_gather, func, items, threads)
    except ExceptionGroup as group:
        if len(group.exceptions) == 1:
            raise group.exceptions[0] from None
        raise
