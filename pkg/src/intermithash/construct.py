"""Block-cipher hash constructions: Davies-Meyer, Matyas-Meyer-Oseas,
Miyaguchi-Preneel over Speck, iterated Merkle-Damgard style.

Messages are sliced into equal fragments (key-width for DM, block-width
for MMO/MP), zero-padded to a whole number of fragments, and folded from
a fixed all-zero IV.  There is deliberately NO length strengthening: a
message and the same message extended with zero bytes up to the next
fragment boundary produce the same digest.  That aliasing is a documented
property of the scheme under study, not a bug; the collision figures the
quality battery reports depend on it.

The chaining value is the digest (block width); it is serialized exactly
as the cipher serializes blocks (one little-endian integer), rendered as
lowercase hex on the CLI.

Compression steps (E = cipher, g = width adapter, h = chain, m = fragment):

    DM   h' = E_m(h)    xor h
    MMO  h' = E_g(h)(m) xor m
    MP   h' = E_g(h)(m) xor m xor h

g maps the block-wide chain onto the key port for MMO/MP, either by
zero-padding or by duplicating the value end-to-end; at 128-bit block and
key it is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import speck
from .speck import SPECK128_128, SpeckVariant

__all__ = [
    "KINDS",
    "G_MODES",
    "Construction",
    "ChainState",
    "pad_message",
    "g_map",
    "compress_dm",
    "compress_mmo",
    "compress_mp",
    "hash_message",
    "ConstructionHasher",
    "DM_SPECK128",
    "MMO_SPECK128",
    "MP_SPECK128",
]

KINDS = ("dm", "mmo", "mp")
G_MODES = ("zeropad", "duplicate")


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def pad_message(message: bytes, fragment_bytes: int) -> list[bytes]:
    """Slice into fragment_bytes pieces, zero-filling the tail.

    The empty message yields one all-zero fragment, so every message costs
    at least one compression.
    """
    if fragment_bytes <= 0:
        raise ValueError("fragment_bytes must be positive")
    if not message:
        return [bytes(fragment_bytes)]
    frags = [
        bytes(message[i : i + fragment_bytes])
        for i in range(0, len(message), fragment_bytes)
    ]
    tail = len(frags[-1])
    if tail != fragment_bytes:
        frags[-1] = frags[-1] + bytes(fragment_bytes - tail)
    return frags


def g_map(value: bytes, target_bits: int, mode: str = "zeropad") -> bytes:
    """Adapt a chaining value to the cipher's key width.

    zeropad: append zero bytes (or truncate to the low-order bytes when the
    target is narrower).  duplicate: repeat the value end-to-end until the
    target width is covered, then truncate.  Identity when widths match.
    """
    if not value:
        raise ValueError("g_map input must be non-empty")
    if target_bits <= 0 or target_bits % 8 != 0:
        raise ValueError("target_bits must be a positive multiple of 8")
    if mode not in G_MODES:
        raise ValueError(f"unknown g mode {mode!r}")
    target = target_bits // 8
    if target == len(value):
        return bytes(value)
    if mode == "zeropad":
        if target > len(value):
            return bytes(value) + bytes(target - len(value))
        return bytes(value[:target])
    reps = -(-target // len(value))
    return (bytes(value) * reps)[:target]


@dataclass(frozen=True)
class Construction:
    """A concrete hash: compression kind + cipher binding + g mode + IV."""

    kind: str
    cipher: SpeckVariant = SPECK128_128
    g_mode: str = "zeropad"
    iv: bytes = None  # type: ignore[assignment]  # None -> zero block

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown construction kind {self.kind!r}")
        if self.g_mode not in G_MODES:
            raise ValueError(f"unknown g mode {self.g_mode!r}")
        if self.iv is None:
            object.__setattr__(self, "iv", bytes(self.cipher.block_bytes))
        elif len(self.iv) != self.cipher.block_bytes:
            raise ValueError("iv width must equal the cipher block width")

    @property
    def fragment_bytes(self) -> int:
        # DM keys the cipher with the message, so it slices at key width;
        # MMO/MP feed the message to the plaintext port, so block width.
        return self.cipher.key_bytes if self.kind == "dm" else self.cipher.block_bytes

    @property
    def digest_bytes(self) -> int:
        return self.cipher.block_bytes

    @property
    def name(self) -> str:
        return f"{self.kind}-speck{self.cipher.block_bits}"

    def new(self) -> "ConstructionHasher":
        return ConstructionHasher(self)

    def hash(self, message: bytes) -> bytes:
        return hash_message(self, message)


@dataclass
class ChainState:
    h: bytes
    blocks_consumed: int = 0


def _encrypt(construction: Construction, key: bytes, pt: bytes, encrypt) -> bytes:
    # encrypt, when given, is a test stub with signature (key, pt) -> ct
    if encrypt is None:
        return speck.encrypt_block(construction.cipher, key, pt)
    return encrypt(key, pt)


def compress_dm(
    construction: Construction, state: ChainState, m_i: bytes, encrypt=None
) -> ChainState:
    """h' = E_m(h) xor h."""
    if len(m_i) != construction.cipher.key_bytes:
        raise ValueError("DM fragment width must equal the key width")
    c = _encrypt(construction, m_i, state.h, encrypt)
    return ChainState(_xor(c, state.h), state.blocks_consumed + 1)


def compress_mmo(
    construction: Construction, state: ChainState, m_i: bytes, encrypt=None
) -> ChainState:
    """h' = E_g(h)(m) xor m."""
    if len(m_i) != construction.cipher.block_bytes:
        raise ValueError("MMO fragment width must equal the block width")
    key = g_map(state.h, construction.cipher.key_bits, construction.g_mode)
    c = _encrypt(construction, key, m_i, encrypt)
    return ChainState(_xor(c, m_i), state.blocks_consumed + 1)


def compress_mp(
    construction: Construction, state: ChainState, m_i: bytes, encrypt=None
) -> ChainState:
    """h' = E_g(h)(m) xor m xor h."""
    if len(m_i) != construction.cipher.block_bytes:
        raise ValueError("MP fragment width must equal the block width")
    key = g_map(state.h, construction.cipher.key_bits, construction.g_mode)
    c = _encrypt(construction, key, m_i, encrypt)
    return ChainState(_xor(_xor(c, m_i), state.h), state.blocks_consumed + 1)


_COMPRESS = {"dm": compress_dm, "mmo": compress_mmo, "mp": compress_mp}


def hash_message(construction: Construction, message: bytes, encrypt=None) -> bytes:
    """Pad, fold the compression over all fragments from the IV, return H_n."""
    step = _COMPRESS[construction.kind]
    state = ChainState(construction.iv)
    for frag in pad_message(message, construction.fragment_bytes):
        state = step(construction, state, frag, encrypt)
    return state.h


class ConstructionHasher:
    """Streaming interface over a Construction, hashlib-style.

    update()/digest()/hexdigest()/copy(), plus deterministic work counters
    (compressions, cipher_calls) the benchmark reports.  digest() may be
    called at any point; it finalizes a snapshot and leaves the stream
    usable, so prefix digests are cheap.
    """

    def __init__(self, construction: Construction):
        self.construction = construction
        self.name = construction.name
        self.digest_size = construction.digest_bytes
        self.block_size = construction.fragment_bytes
        self._step = _COMPRESS[construction.kind]
        self._state = ChainState(construction.iv)
        self._buf = bytearray()
        self._total = 0
        self.cipher_calls = 0

    @property
    def compressions(self) -> int:
        return self._state.blocks_consumed

    def update(self, data: bytes) -> "ConstructionHasher":
        self._buf += data
        self._total += len(data)
        frag = self.block_size
        if len(self._buf) >= frag:
            whole = len(self._buf) // frag * frag
            for i in range(0, whole, frag):
                self._state = self._step(
                    self.construction, self._state, bytes(self._buf[i : i + frag])
                )
                self.cipher_calls += 1
            del self._buf[:whole]
        return self

    def _final_state(self) -> ChainState:
        if self._total == 0:
            return self._step(self.construction, self._state, bytes(self.block_size))
        if self._buf:
            padded = bytes(self._buf) + bytes(self.block_size - len(self._buf))
            return self._step(self.construction, self._state, padded)
        return self._state

    def digest(self) -> bytes:
        return self._final_state().h

    def hexdigest(self) -> str:
        return self.digest().hex()

    def copy(self) -> "ConstructionHasher":
        dup = ConstructionHasher(self.construction)
        dup._state = ChainState(self._state.h, self._state.blocks_consumed)
        dup._buf = bytearray(self._buf)
        dup._total = self._total
        dup.cipher_calls = self.cipher_calls
        return dup


DM_SPECK128 = Construction("dm")
MMO_SPECK128 = Construction("mmo")
MP_SPECK128 = Construction("mp")
