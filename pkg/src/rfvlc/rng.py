"""Seeded substreams.

Every draw index maps to a fixed chunk, and every chunk owns an independent
``SeedSequence`` child, so results do not depend on how chunks are
distributed over workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

CHUNK = 1 << 16


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for the substream identified by ``(seed, *key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_sizes(n: int, chunk: int = CHUNK) -> list[int]:
    full, rest = divmod(int(n), chunk)
    return [chunk] * full + ([rest] if rest else [])


def map_chunks(fn: Callable[[np.random.Generator, int], object], n: int, seed: int,
               stream: int = 0, workers: int = 1, chunk: int = CHUNK) -> list:
    """Apply ``fn(rng, size)`` to each chunk of ``n`` draws, results in chunk order.

    ``stream`` separates unrelated uses of the same seed.
    """
    sizes = chunk_sizes(n, chunk)
    jobs = [(substream(seed, stream, i), s) for i, s in enumerate(sizes)]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(rng, s) for rng, s in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def concat(parts: Sequence) -> np.ndarray:
    return np.concatenate(parts) if parts else np.empty(0)
