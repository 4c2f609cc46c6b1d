"""Deterministic, splittable 64-bit pseudorandom numbers.

Everything statistical in this package (keyset generation, avalanche
messages, differential pairs, harvest noise, per-trial seeds) draws from
SplitMix64 so that reports are reproducible bit-for-bit on any machine.
SplitMix64 is counter-based: output i of a stream seeded with s is

    mix64(s + (i+1) * GOLDEN)

where GOLDEN = floor(2^64 / phi) and mix64 is the murmur-style finalizer
below.  Child streams are derived by hashing a label path into a new seed,
so independent consumers never share a stream.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x00000100000001B3

__all__ = [
    "MASK64",
    "mix64",
    "derive_seed",
    "u64_stream",
    "random_bytes",
    "SplitMix64",
]


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a 64-bit bijective scrambler."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _MIX1) & MASK64
    x = ((x ^ (x >> 27)) * _MIX2) & MASK64
    return x ^ (x >> 31)


def _label_to_int(label: "int | str") -> int:
    if isinstance(label, int):
        return label & MASK64
    # FNV-1a over UTF-8; stable across processes, unlike built-in hash().
    acc = _FNV_OFFSET
    for b in label.encode("utf-8"):
        acc = ((acc ^ b) * _FNV_PRIME) & MASK64
    return acc


def derive_seed(seed: int, *path: "int | str") -> int:
    """Derive a child seed from a root seed and a label path.

    derive_seed(s, "avalanche", 3) and derive_seed(s, "avalanche", 4) are
    independent for all practical purposes; the same path always yields the
    same child.
    """
    acc = seed & MASK64
    for label in path:
        acc = mix64((acc + GOLDEN) & MASK64) ^ mix64(_label_to_int(label))
    return mix64((acc + GOLDEN) & MASK64)


def u64_stream(seed: int, n: int, offset: int = 0) -> np.ndarray:
    """First n (or n starting at offset) SplitMix64 outputs as uint64."""
    idx = np.arange(offset + 1, offset + n + 1, dtype=np.uint64)
    x = (np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN)).astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def random_bytes(seed: int, n: int) -> bytes:
    """n deterministic pseudorandom bytes (little-endian word serialization)."""
    words = u64_stream(seed, (n + 7) // 8)
    return words.astype("<u8").tobytes()[:n]


class SplitMix64:
    """Sequential view of the same stream, for scalar consumers."""

    def __init__(self, seed: int):
        self._seed = seed & MASK64
        self._i = 0

    def next_u64(self) -> int:
        self._i += 1
        return mix64((self._seed + self._i * GOLDEN) & MASK64)

    def next_float(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def next_gauss(self) -> float:
        """Standard normal via Box-Muller on two stream outputs."""
        import math

        u1 = max(self.next_float(), 2.0 ** -60)
        u2 = self.next_float()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def split(self, *path: "int | str") -> "SplitMix64":
        return SplitMix64(derive_seed(self._seed, self._i, *path))
