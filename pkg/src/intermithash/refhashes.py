"""Baseline cryptographic hashes: MD5 and unkeyed BLAKE2s-256.

Both wrap the stdlib implementations behind the same streaming interface
as the block-cipher constructions (update/digest/hexdigest/copy plus the
deterministic work counters the benchmark reports), so every consumer in
this package treats all hashes uniformly.

Compression counts are derived from the padding rules rather than probed
from the backend:

    MD5      blocks of 64 bytes; padding adds 0x80, zeros to 56 mod 64,
             then an 8-byte length, so count = (len + 8)//64 + 1.
    BLAKE2s  blocks of 64 bytes, no length block, the empty message still
             costs one compression: count = max(1, ceil(len/64)).

state_bytes is a documented proxy for streaming-state RAM: internal state
words + one input block buffer + the length/offset counter.
"""

from __future__ import annotations

import hashlib

__all__ = ["RefHasher", "md5", "blake2s", "md5_compressions", "blake2s_compressions"]


def md5_compressions(length: int) -> int:
    return (length + 8) // 64 + 1


def blake2s_compressions(length: int) -> int:
    return max(1, (length + 63) // 64)


_BACKENDS = {
    # name: (factory, digest_size, block_size, state_bytes, compression_fn)
    "md5": (hashlib.md5, 16, 64, 16 + 64 + 8, md5_compressions),
    "blake2s": (lambda: hashlib.blake2s(digest_size=32), 32, 64, 32 + 64 + 8, blake2s_compressions),
}


class RefHasher:
    """Streaming wrapper with the package-wide hashing interface."""

    def __init__(self, name: str, _impl=None, _length: int = 0):
        if name not in _BACKENDS:
            raise ValueError(f"unknown reference hash {name!r}")
        factory, digest_size, block_size, state_bytes, count_fn = _BACKENDS[name]
        self.name = name
        self.digest_size = digest_size
        self.block_size = block_size
        self.state_bytes = state_bytes
        self._count_fn = count_fn
        self._impl = _impl if _impl is not None else factory()
        self._length = _length
        self.cipher_calls = 0  # no block cipher underneath

    @property
    def compressions(self) -> int:
        return self._count_fn(self._length)

    def update(self, data: bytes) -> "RefHasher":
        self._impl.update(data)
        self._length += len(data)
        return self

    def digest(self) -> bytes:
        return self._impl.digest()

    def hexdigest(self) -> str:
        return self._impl.hexdigest()

    def copy(self) -> "RefHasher":
        return RefHasher(self.name, _impl=self._impl.copy(), _length=self._length)


def md5() -> RefHasher:
    return RefHasher("md5")


def blake2s() -> RefHasher:
    return RefHasher("blake2s")
