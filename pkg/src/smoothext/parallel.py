"""Ordered process-pool map.

Results always come back in submission order, so anything assembled from
them is independent of the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

from .numerics import backend as sc


def _init_worker(bits: int) -> None:
    sc.set_precision(bits)


def ordered_map(fn: Callable, jobs: Iterable[Sequence], workers: int = 1) -> list:
    """``[fn(*job) for job in jobs]``, optionally spread over processes."""
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ProcessPoolExecutor(
        max_workers=min(workers, len(jobs)),
        initializer=_init_worker,
        initargs=(sc.get_precision(),),
    ) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]


def chunked(seq: Sequence, parts: int) -> list:
    """Split ``seq`` into at most ``parts`` contiguous, nonempty slices."""
    parts = max(1, min(parts, len(seq)))
    size, extra = divmod(len(seq), parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + size + (1 if i < extra else 0)
        out.append(list(seq[start:stop]))
        start = stop
    return [c for c in out if c]
