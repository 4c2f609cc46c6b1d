"""Uniform access to every named hash in the toolkit.

Registry keys are the exact names the CLI and reports use: md5, blake2s,
dm-speck128, mmo-speck128, mp-speck128.  All factories return streaming
hashers with the same surface (update/digest/hexdigest/copy, digest_size,
block_size, compressions, cipher_calls), so the quality battery, the
benchmark, and the CLI never special-case a hash.
"""

from __future__ import annotations

from . import construct, refhashes

__all__ = [
    "HASH_NAMES",
    "SPECK_KINDS",
    "new",
    "digest",
    "hexdigest",
    "compression_count",
    "cipher_call_count",
    "state_bytes",
    "digest_bits",
]

_CONSTRUCTIONS = {
    "dm-speck128": construct.DM_SPECK128,
    "mmo-speck128": construct.MMO_SPECK128,
    "mp-speck128": construct.MP_SPECK128,
}

# Construction kind by registry name, for the vectorized battery paths.
SPECK_KINDS = {name: c.kind for name, c in _CONSTRUCTIONS.items()}

_REF_FACTORIES = {
    "md5": refhashes.md5,
    "blake2s": refhashes.blake2s,
}

_REF_COUNTS = {
    "md5": refhashes.md5_compressions,
    "blake2s": refhashes.blake2s_compressions,
}

HASH_NAMES = ("md5", "blake2s", "dm-speck128", "mmo-speck128", "mp-speck128")


def new(name: str):
    """Fresh streaming hasher for a registry name."""
    if name in _REF_FACTORIES:
        return _REF_FACTORIES[name]()
    if name in _CONSTRUCTIONS:
        return _CONSTRUCTIONS[name].new()
    raise ValueError(f"unknown hash {name!r}; choose from {', '.join(HASH_NAMES)}")


def digest(name: str, message: bytes) -> bytes:
    return new(name).update(message).digest()


def hexdigest(name: str, message: bytes) -> str:
    return digest(name, message).hex()


def digest_bits(name: str) -> int:
    return new(name).digest_size * 8


def compression_count(name: str, length: int) -> int:
    """Compression-function invocations to hash `length` bytes."""
    if name in _REF_COUNTS:
        return _REF_COUNTS[name](length)
    if name in _CONSTRUCTIONS:
        frag = _CONSTRUCTIONS[name].fragment_bytes
        return max(1, -(-length // frag))
    raise ValueError(f"unknown hash {name!r}")


def cipher_call_count(name: str, length: int) -> int:
    """Underlying block-cipher invocations (zero for the reference hashes)."""
    if name in _CONSTRUCTIONS:
        return compression_count(name, length)
    if name in _REF_FACTORIES:
        return 0
    raise ValueError(f"unknown hash {name!r}")


def state_bytes(name: str) -> int:
    """Streaming-state RAM proxy: chain/state + block buffer + counter."""
    if name in _REF_FACTORIES:
        return _REF_FACTORIES[name]().state_bytes
    if name in _CONSTRUCTIONS:
        c = _CONSTRUCTIONS[name]
        return c.digest_bytes + c.fragment_bytes + 8
    raise ValueError(f"unknown hash {name!r}")
