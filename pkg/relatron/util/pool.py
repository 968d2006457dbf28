"""Order-preserving parallel map over a thread pool."""

import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from ..logs import current_context, log_context
from .system import resolve_threads

__all__ = ("parallel_map",)

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger(__name__)


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: int | None = 1) -> list[R]:
    """Apply `func` to every item, returning results in input order.

    Work units must derive their own RNG streams, so results do not depend on the
    thread count. Workers log under the caller's run context.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]

    context = current_context()

    def call(item: T) -> R:
        with log_context(**context):
            return func(item)

    logger.debug("Mapping %d items over %d threads", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="relatron") as executor:
        return list(executor.map(call, items))
