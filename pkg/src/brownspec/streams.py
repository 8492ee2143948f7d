"""Splittable, counter-based random streams.

Every random draw in the package comes from ``stream(seed, *keys)``. The keys
identify a sub-stream (an experiment tag, a level, a trial index, ...) so that
independent tasks can run in any order, or concurrently, and still reproduce
the same numbers.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "key_of"]


def key_of(label) -> int:
    """Map a stream label (int or str) to a non-negative integer key."""
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError(f"stream keys must be non-negative, got {label}")
        return int(label)
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    raise TypeError(f"unsupported stream key {label!r}")


def stream(seed: int, *keys) -> np.random.Generator:
    """Return an independent generator for the sub-stream ``(seed, *keys)``.

    Philox is counter based, so the stream is fully determined by the key
    material; nothing is shared between calls.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(key_of(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))
