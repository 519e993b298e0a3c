"""Seed handling and reproducible per-replicate random streams.

Every random draw in the package goes through a :class:`numpy.random.Generator`
backed by the counter-based Philox bit generator.  Streams are split from a
single 64-bit master seed by appending integer keys to the ``spawn_key`` of a
:class:`numpy.random.SeedSequence`::

    stream(seed, *keys) = Generator(Philox(SeedSequence(seed, spawn_key=keys)))

The mapping is a pure function of ``(seed, keys)``.  Replicate ``r`` of an
experiment always receives the same stream, no matter how many replicates are
requested or how the work is split across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar, Union

import numpy as np

SeedLike = Union[int, np.integer, np.random.SeedSequence, np.random.Generator]

MAX_SEED = 2**64 - 1

# Stream namespaces; keep stable, they are part of the reproducibility contract.
WALK_INCREMENTS = 1
WALK_NOISE = 2
LIMIT_PATHS = 3
PSI_PATHS = 4
LEPAGE_DISCRETE = 5
LEPAGE_LIMIT = 6
DISCRETE_EXPERIMENT = 7
SANDWICH_EXPERIMENT = 8
SELF_SIMILARITY = 9

T = TypeVar("T")


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    """Coerce a seed token into a :class:`~numpy.random.SeedSequence`.

    A ``Generator`` is consumed for one 64-bit draw; integers and seed
    sequences are used as they are.
    """
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(0, 2**63)))
    return np.random.SeedSequence(check_seed(seed))


def child(ss: np.random.SeedSequence, *keys: int) -> np.random.SeedSequence:
    """Derive a sub-sequence without mutating ``ss`` (unlike ``ss.spawn``)."""
    return np.random.SeedSequence(ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(keys))


def generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(as_seed_sequence(seed)))


def stream(seed: SeedLike, *keys: int) -> np.random.Generator:
    """Independent Philox stream for ``keys`` under the master ``seed``."""
    return np.random.Generator(np.random.Philox(child(as_seed_sequence(seed), *keys)))


def chunked(n: int, size: int) -> list[range]:
    return [range(lo, min(lo + size, n)) for lo in range(0, n, size)]


def map_chunks(
    fn: Callable[[range], T], n: int, chunk_size: int = 256, threads: int = 1
) -> list[T]:
    """Apply ``fn`` to fixed replicate chunks, returning results in chunk order.

    The partition into chunks depends only on ``n`` and ``chunk_size``, so the
    output is identical for every value of ``threads``.
    """
    chunks = chunked(n, chunk_size)
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def concat(parts: Sequence[np.ndarray]) -> np.ndarray:
    if not parts:
        return np.empty(0)
    return np.concatenate(parts, axis=0)
