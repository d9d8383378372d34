"""Deterministic RNG substreams.

Every source of randomness in a match (perception noise, message loss,
baseline policies) draws from its own stream derived from the base seed
plus a tag path, so systems never perturb each other's sequences and
identical (seed, config) runs are bit-identical.
"""

from __future__ import annotations

import random
import zlib

_MASK = 0xFFFFFFFFFFFFFFFF


def _mix(seed: int, part: int | str) -> int:
    # crc32, never built-in hash(): str hashing is randomized per process.
    if isinstance(part, str):
        part = zlib.crc32(part.encode("utf-8"))
    seed = (seed * 6364136223846793005 + 1442695040888963407) & _MASK
    return (seed ^ (part & _MASK)) & _MASK


def _finalize(z: int) -> int:
    # splitmix64 finalizer: avalanches low-entropy tag differences.
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SeedStream:
    """Derives independent `random.Random` instances and single uniform
    draws from one base seed plus a tag path."""

    __slots__ = ("base",)

    def __init__(self, base: int):
        self.base = int(base) & _MASK

    def derive(self, *tags: int | str) -> int:
        seed = self.base
        for tag in tags:
            seed = _mix(seed, tag)
        return _finalize(seed)

    def rng(self, *tags: int | str) -> random.Random:
        return random.Random(self.derive(*tags))

    def uniform(self, *tags: int | str) -> float:
        """One draw in [0, 1), a pure function of (base, tags)."""
        return self.derive(*tags) / 18446744073709551616.0
