# -*- coding: utf-8 -*-
"""
In-process backend, the default when a single worker is requested
"""
from __future__ import annotations

from typing import Callable, Iterable, TypeVar

from .base import ExecutorBase

__all__ = ["SerialExecutor"]

T = TypeVar("T")
R = TypeVar("R")


class SerialExecutor(ExecutorBase):
    """A backend that evaluates everything in the calling thread"""

    def __init__(self, threads: int = 1) -> None:
        super().__init__(threads=1)

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        return [fn(item) for item in items]
