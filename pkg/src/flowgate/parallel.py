"""Worker-pool helpers.

FLOWGATE_THREADS caps the number of worker threads used for embarrassingly
parallel work (per-tree forest fits, swarm objective evaluations). Every
parallelized task is a pure function of its inputs, so results are identical
for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

from .errors import ConfigError

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "FLOWGATE_THREADS"


def worker_count() -> int:
    """Number of worker threads to use, capped by FLOWGATE_THREADS."""
    limit = os.cpu_count() or 1
    raw = os.environ.get(ENV_THREADS)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{ENV_THREADS} must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise ConfigError(f"{ENV_THREADS} must be >= 1, got {cap}")
        limit = min(limit, cap)
    return limit


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Order-preserving map, threaded when more than one worker is allowed."""
    seq: Sequence[T] = list(items)
    workers = min(worker_count(), len(seq))
    if workers <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
