"""Speck block cipher, encrypt-only.

Implements the two 128-bit-key variants the hash constructions need:
Speck64/128 (32-bit words, 27 rounds) and Speck128/128 (64-bit words,
32 rounds).  Both use the rotation amounts alpha=8, beta=3.

Byte convention follows the designers' reference implementation: a block
or key is one little-endian integer, so the low word of a block is y and
the high word is x, and key word k0 occupies the lowest bytes.  With this
packing the published test vectors apply bit-exactly.

Round function (word size w, all arithmetic mod 2^w):

    x = (ROR(x, 8) + y) ^ k
    y = ROL(y, 3) ^ x

The key schedule reuses the round function on the key words with the
round index as the round key.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "SpeckVariant",
    "SPECK64_128",
    "SPECK128_128",
    "key_schedule",
    "encrypt_words",
    "encrypt_block",
]

ALPHA = 8
BETA = 3


@dataclass(frozen=True)
class SpeckVariant:
    block_bits: int
    key_bits: int
    rounds: int

    def __post_init__(self):
        if (self.block_bits, self.key_bits) == (64, 128):
            expected = 27
        elif (self.block_bits, self.key_bits) == (128, 128):
            expected = 32
        else:
            raise ValueError(
                f"unsupported Speck variant {self.block_bits}/{self.key_bits}"
            )
        if self.rounds != expected:
            raise ValueError(
                f"Speck{self.block_bits}/{self.key_bits} has {expected} rounds, "
                f"not {self.rounds}"
            )

    @property
    def word_bits(self) -> int:
        return self.block_bits // 2

    @property
    def word_bytes(self) -> int:
        return self.word_bits // 8

    @property
    def block_bytes(self) -> int:
        return self.block_bits // 8

    @property
    def key_bytes(self) -> int:
        return self.key_bits // 8

    @property
    def key_words(self) -> int:
        return self.key_bits // self.word_bits

    @property
    def name(self) -> str:
        return f"speck{self.block_bits}/{self.key_bits}"


SPECK64_128 = SpeckVariant(block_bits=64, key_bits=128, rounds=27)
SPECK128_128 = SpeckVariant(block_bits=128, key_bits=128, rounds=32)


def _round(x: int, y: int, k: int, word_bits: int, mask: int):
    x = ((((x >> ALPHA) | (x << (word_bits - ALPHA))) & mask) + y) & mask ^ k
    y = (((y << BETA) | (y >> (word_bits - BETA))) & mask) ^ x
    return x, y


def key_schedule(variant: SpeckVariant, key: bytes) -> list[int]:
    """Expand a key into the per-round key words.

    Inputs:
        key: variant.key_bytes little-endian bytes; lowest word is k0.
    Returns a list of `variant.rounds` word-sized integers.
    """
    if len(key) != variant.key_bytes:
        raise ValueError(
            f"{variant.name} key must be {variant.key_bytes} bytes, got {len(key)}"
        )
    wb = variant.word_bits
    mask = (1 << wb) - 1
    wbytes = variant.word_bytes
    words = [
        int.from_bytes(key[i * wbytes : (i + 1) * wbytes], "little")
        for i in range(variant.key_words)
    ]
    k = words[0]
    ls = words[1:]  # l_0 .. l_{m-2}, rotated in place below
    rk = [k]
    for i in range(variant.rounds - 1):
        l_new, k = _round(ls[0], k, i, wb, mask)
        ls = ls[1:] + [l_new]
        rk.append(k)
    return rk


def encrypt_words(variant: SpeckVariant, round_keys: list[int], x: int, y: int):
    """Encrypt the word pair (x=high, y=low) under a precomputed schedule."""
    wb = variant.word_bits
    mask = (1 << wb) - 1
    for k in round_keys:
        x, y = _round(x, y, k, wb, mask)
    return x, y


def encrypt_block(variant: SpeckVariant, key: bytes, plaintext: bytes) -> bytes:
    """One-block encryption over little-endian byte strings."""
    if len(plaintext) != variant.block_bytes:
        raise ValueError(
            f"{variant.name} block must be {variant.block_bytes} bytes, "
            f"got {len(plaintext)}"
        )
    wbytes = variant.word_bytes
    y = int.from_bytes(plaintext[:wbytes], "little")
    x = int.from_bytes(plaintext[wbytes:], "little")
    x, y = encrypt_words(variant, key_schedule(variant, key), x, y)
    return y.to_bytes(wbytes, "little") + x.to_bytes(wbytes, "little")
