from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, TypeVar

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

T = TypeVar("T")


def shard_streams(seed: int, shards: int) -> List[np.random.Generator]:
    if shards < 1:
        raise ConfigError("shards", f"must be positive, got {shards}")
    if seed < 0:
        raise ConfigError("seed", f"must be non-negative, got {seed}")
    children = np.random.SeedSequence(seed).spawn(shards)
    return [np.random.default_rng(child) for child in children]


def split_samples(samples: int, shards: int) -> List[int]:
    if samples < 0:
        raise ConfigError("samples", f"must be non-negative, got {samples}")
    if shards < 1:
        raise ConfigError("shards", f"must be positive, got {shards}")
    base, extra = divmod(samples, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def run_sharded(
    fn: Callable[[int, np.random.Generator], T],
    samples: int,
    seed: int,
    shards: int = 1,
    *,
    max_workers: Optional[int] = None,
) -> List[T]:
    """Run ``fn(count, rng)`` once per shard; results come back in shard order."""
    counts = split_samples(samples, shards)
    streams = shard_streams(seed, shards)
    max_workers = max(1, min(max_workers or shards, shards))

    if max_workers == 1:
        return [fn(count, rng) for count, rng in zip(counts, streams)]

    results = []
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(fn, count, rng): idx for idx, (count, rng) in enumerate(zip(counts, streams))}
        for future in as_completed(futures):
            idx = futures[future]
            results.append((idx, future.result()))
            logger.debug("Shard %s/%s finished", idx + 1, shards)

    # merge in shard order
    return [result for _, result in sorted(results, key=lambda x: x[0])]
