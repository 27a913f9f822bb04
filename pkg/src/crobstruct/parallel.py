"""Optional process-level parallelism, capped by ``CROBSTRUCT_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def worker_count() -> int:
    raw = os.environ.get("CROBSTRUCT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn: Callable, items: Sequence) -> list:
    """``[fn(x) for x in items]``, in order; uses worker processes when allowed."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
