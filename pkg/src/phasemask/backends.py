"""Execution strategies for per-pixel kernels and deterministic reductions.

A kernel is an elementwise-pure function of equally shaped flat array chunks:
``kernel(*chunks) -> chunk``. Purity (no cross-pixel reads) guarantees that
any partition of the index range yields bitwise-identical output, which is
what lets serial and threaded execution share one kernel definition.

Reductions always use the same fixed block tree regardless of strategy or
worker count, so convergence metrics are bitwise reproducible.
"""

from __future__ import annotations

import atexit
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

SERIAL = "serial"
THREADED = "threaded"

# Fixed reduction block; must not depend on worker count.
_REDUCE_BLOCK = 1 << 14
# Below this, threading overhead dominates; run chunks inline.
_MIN_CHUNK = 1 << 12

_pools: dict[int, ThreadPoolExecutor] = {}


def _pool(workers: int) -> ThreadPoolExecutor:
    pool = _pools.get(workers)
    if pool is None:
        pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="phasemask")
        _pools[workers] = pool
    return pool


@atexit.register
def _shutdown_pools():
    for pool in _pools.values():
        pool.shutdown(wait=False, cancel_futures=True)
    _pools.clear()


@dataclass(frozen=True)
class BackendSelector:
    """Run-time choice of execution strategy for the per-pixel hot path."""

    strategy: str = SERIAL
    workers: int = 1

    def __post_init__(self):
        if self.strategy not in (SERIAL, THREADED):
            raise ValueError(f"unknown strategy: {self.strategy!r}")
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")

    @staticmethod
    def parse(text: str) -> "BackendSelector":
        """Parse 'serial' or 'threaded[:N]' as used by CLI flags."""
        if text == SERIAL:
            return BackendSelector(SERIAL)
        if text == THREADED:
            return BackendSelector(THREADED, workers=_default_workers())
        if text.startswith(THREADED + ":"):
            return BackendSelector(THREADED, workers=int(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse strategy {text!r}")

    @property
    def fft_workers(self) -> int:
        return self.workers if self.strategy == THREADED else 1


def _default_workers() -> int:
    import os
    return os.cpu_count() or 1


def map_pixels(kernel, inputs: tuple[np.ndarray, ...], sel: BackendSelector,
               out_dtype: np.dtype) -> np.ndarray:
    """Apply an elementwise-pure kernel over flat views of the input grids.

    Output is bitwise identical across strategies and worker counts.
    """
    shape = inputs[0].shape
    flats = [np.ascontiguousarray(a).reshape(-1) for a in inputs]
    n = flats[0].size
    for a in flats[1:]:
        if a.size != n:
            raise ValueError("input grids must share one spec")
    if sel.strategy == SERIAL or sel.workers == 1 or n < 2 * _MIN_CHUNK:
        out = kernel(*flats)
        return np.asarray(out, dtype=out_dtype).reshape(shape)

    out = np.empty(n, dtype=out_dtype)
    chunk = max(_MIN_CHUNK, -(-n // sel.workers))

    def run(start: int):
        stop = min(n, start + chunk)
        out[start:stop] = kernel(*(a[start:stop] for a in flats))

    futures = [_pool(sel.workers).submit(run, s) for s in range(0, n, chunk)]
    for fut in futures:
        fut.result()
    return out.reshape(shape)


def deterministic_sum(values: np.ndarray, sel: BackendSelector | None = None) -> float:
    """Sum with a fixed block tree: block partial sums combined in block order.

    The tree shape depends only on the array length, never on the strategy,
    so serial and threaded runs agree bitwise.
    """
    flat = np.ascontiguousarray(values).reshape(-1)
    n = flat.size
    if n == 0:
        raise ValueError("cannot reduce an empty grid")
    starts = range(0, n, _REDUCE_BLOCK)
    if sel is not None and sel.strategy == THREADED and sel.workers > 1 and n > 2 * _REDUCE_BLOCK:
        partials = list(_pool(sel.workers).map(
            lambda s: np.sum(flat[s:s + _REDUCE_BLOCK]), starts))
    else:
        partials = [np.sum(flat[s:s + _REDUCE_BLOCK]) for s in starts]
    return float(np.sum(np.asarray(partials)))


def reduce_pixels(combiner, grid: np.ndarray, sel: BackendSelector) -> float:
    """Reduce a grid to a scalar with the fixed-tree order.

    combiner maps a flat chunk to its partial value and must be associative
    up to the fixed tree shape (e.g. np.sum).
    """
    flat = np.ascontiguousarray(grid).reshape(-1)
    n = flat.size
    if n == 0:
        raise ValueError("cannot reduce an empty grid")
    starts = range(0, n, _REDUCE_BLOCK)
    if sel.strategy == THREADED and sel.workers > 1 and n > 2 * _REDUCE_BLOCK:
        partials = list(_pool(sel.workers).map(
            lambda s: combiner(flat[s:s + _REDUCE_BLOCK]), starts))
    else:
        partials = [combiner(flat[s:s + _REDUCE_BLOCK]) for s in starts]
    return float(np.sum(np.asarray(partials)))
