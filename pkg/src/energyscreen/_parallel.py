"""Ordered process-pool map and per-replicate seed streams.

Each replicate gets its own ``SeedSequence`` child, and results come back in
task order. Output therefore does not depend on the number of workers.
"""

import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import _backend


def default_workers():
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:  # pragma: no cover - non-Linux
        return max(1, os.cpu_count() or 1)


def replicate_seeds(seed, count):
    """``count`` independent child seed sequences of ``seed``.

    ``seed`` may itself be a ``SeedSequence``; a fresh copy is spawned from so
    that repeated calls return the same children.
    """
    if isinstance(seed, np.random.SeedSequence):
        root = np.random.SeedSequence(seed.entropy, spawn_key=seed.spawn_key)
    else:
        root = np.random.SeedSequence(seed)
    return root.spawn(count)


def _init_worker(backend):
    _backend.set_backend(backend)


def parallel_map(func, tasks, workers=1):
    """``[func(t) for t in tasks]``, optionally spread over processes.

    ``func`` must be a module-level function. Workers start with the spawn
    method (numba's OpenMP runtime does not survive ``fork``) and inherit the
    caller's backend choice.
    """
    tasks = list(tasks)
    if workers is None:
        workers = default_workers()
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks)), mp_context=ctx,
                             initializer=_init_worker,
                             initargs=(_backend.backend_name(),)) as pool:
        return list(pool.map(func, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
