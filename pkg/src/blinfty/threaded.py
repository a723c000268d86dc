# -*- coding: utf-8 -*-
"""
Thread pool backend

Work items are pure functions over immutable values, so they can be shared freely
between threads. Results are collected in submission order.
"""
from __future__ import annotations

# system imports
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

# local imports
from .base import ExecutorBase

__all__ = ["ThreadedExecutor"]

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ThreadedExecutor(ExecutorBase):
    """A backend backed by :class:`concurrent.futures.ThreadPoolExecutor`

    :param threads: Number of worker threads.
    """

    def __init__(self, threads: int = 4) -> None:
        super().__init__(threads)
        self._pool: ThreadPoolExecutor | None = None

    @property
    def pool(self) -> ThreadPoolExecutor:
        if self._pool is None:
            logger.debug("Starting thread pool with %s workers", self.threads)
            self._pool = ThreadPoolExecutor(
                max_workers=self.threads, thread_name_prefix="blinfty"
            )
        return self._pool

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        items = list(items)
        if len(items) < 2:
            return [fn(item) for item in items]
        return list(self.pool.map(fn, items))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None
