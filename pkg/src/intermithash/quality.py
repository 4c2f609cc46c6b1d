"""Statistical hash-quality battery.

Seven keyset tests (cyclic, two-byte, sparse, permutation, windowed,
all-zero), avalanche, a structured differential test, and the birthday
approximation for collision probability.  Each keyset enumerates a finite,
deterministic multiset of messages; quality is measured by

    collisions          sample_count - distinct digests (a c-way tie
                        contributes c-1), and
    distribution bias   max over output bits j of |2*p_j - 1| * 100,
                        where p_j is the fraction of digests with bit j
                        set (0 = perfectly balanced, 100 = degenerate),

with distribution omitted for the windowed and differential tests.  The
windowed test counts collisions within each window position separately
and reports the sum, so value reuse across windows is not miscounted.

All randomness flows from the SplitMix64 streams in `rng`, so identical
(spec, seed) pairs reproduce reports bit-for-bit on any platform.  The
Speck constructions are evaluated on the vectorized lanes of `speckbatch`
(asserted equivalent to the scalar path in the test suite); other hashes
run through their streaming interface.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import hashes
from .rng import derive_seed, random_bytes, u64_stream
from .speckbatch import digests128_batch

__all__ = [
    "CapacityError",
    "Cyclic",
    "TwoBytes",
    "Sparse",
    "Permutation",
    "Window",
    "Zeros",
    "KeysetResult",
    "CollisionModel",
    "collision_probability",
    "gen_keyset",
    "count_collisions",
    "distribution_bias",
    "keyset_stats",
    "avalanche_bias",
    "differential_test",
    "run_battery",
    "TEST_NAMES",
    "DEFAULT_QUALITY_HASHES",
    "keyset_for",
    "battery_params",
]

DEFAULT_BUDGET_BYTES = 4 << 30
_CHUNK = 1 << 17

# Table layout order of the summary report.
TEST_NAMES = ("avalanche", "cyclic", "twobytes", "differential", "sparse",
              "permutation", "window", "zeros")

# The battery's default subjects: the baseline hash plus the three
# constructions under study. blake2s can be added with --hash.
DEFAULT_QUALITY_HASHES = ("md5", "dm-speck128", "mmo-speck128", "mp-speck128")

PERMUTATION_BLOCKS = tuple(
    v.to_bytes(4, "little")
    for v in (0x00000000, 0x00000001, 0x00000002, 0x00000004,
              0x00000008, 0x00000010, 0x00000020, 0x80000000)
)


class CapacityError(Exception):
    """Keyset too large for the configured memory budget."""


# --------------------------------------------------------------- keysets


@dataclass(frozen=True)
class Cyclic:
    """Random pattern_bytes pattern repeated `repeats` times, n samples."""

    pattern_bytes: int = 8
    repeats: int = 8
    samples: int = 100_000
    kind = "cyclic"
    randomized = True
    distribution_supported = True

    def count(self) -> int:
        return self.samples

    def messages(self, seed: int = 0):
        stream = random_bytes(derive_seed(seed, "cyclic"), self.samples * self.pattern_bytes)
        for i in range(self.samples):
            pat = stream[i * self.pattern_bytes : (i + 1) * self.pattern_bytes]
            yield pat * self.repeats


@dataclass(frozen=True)
class TwoBytes:
    """Every message of length 1..max_len with at most two nonzero bytes."""

    max_len: int = 8
    kind = "twobytes"
    randomized = False
    distribution_supported = True

    def count(self) -> int:
        L = self.max_len
        singles = 255 * (L * (L + 1) // 2)
        pairs = 255 * 255 * sum(l * (l - 1) // 2 for l in range(1, L + 1))
        return singles + pairs

    def messages(self, seed: int = 0):
        for length in range(1, self.max_len + 1):
            for pos in range(length):
                base = bytearray(length)
                for v in range(1, 256):
                    base[pos] = v
                    yield bytes(base)
                base[pos] = 0
            for p1, p2 in itertools.combinations(range(length), 2):
                base = bytearray(length)
                for v1 in range(1, 256):
                    base[p1] = v1
                    for v2 in range(1, 256):
                        base[p2] = v2
                        yield bytes(base)
                    base[p2] = 0
                base[p1] = 0


@dataclass(frozen=True)
class Sparse:
    """All msg_bits-bit messages with at most max_set_bits bits set."""

    msg_bits: int = 512
    max_set_bits: int = 3
    kind = "sparse"
    randomized = False
    distribution_supported = True

    def count(self) -> int:
        return sum(math.comb(self.msg_bits, j) for j in range(self.max_set_bits + 1))

    def messages(self, seed: int = 0):
        nbytes = (self.msg_bits + 7) // 8
        for j in range(self.max_set_bits + 1):
            for bits in itertools.combinations(range(self.msg_bits), j):
                m = bytearray(nbytes)
                for b in bits:
                    m[b >> 3] |= 1 << (b & 7)
                yield bytes(m)


@dataclass(frozen=True)
class Permutation:
    """Ordered arrangements of k = 0..block_count distinct blocks.

    The full-length slice is every permutation of the whole block list;
    the shorter arrangements give the keyset its variable lengths, which
    is what exposes zero-padding aliasing (a trailing zero block aliases
    with its own absence).
    """

    blocks: tuple = PERMUTATION_BLOCKS
    block_count: int = None  # type: ignore[assignment]  # None -> len(blocks)
    kind = "permutation"
    randomized = False
    distribution_supported = True

    def __post_init__(self):
        if self.block_count is None:
            object.__setattr__(self, "block_count", len(self.blocks))
        if not 0 <= self.block_count <= len(self.blocks):
            raise ValueError("block_count out of range")
        if len(set(self.blocks)) != len(self.blocks):
            raise ValueError("blocks must be distinct")

    def count(self) -> int:
        n = len(self.blocks)
        return sum(math.perm(n, k) for k in range(self.block_count + 1))

    def messages(self, seed: int = 0):
        for k in range(self.block_count + 1):
            for arrangement in itertools.permutations(self.blocks, k):
                yield b"".join(arrangement)


@dataclass(frozen=True)
class Window:
    """Every window_bits value rotated to each bit offset of a zero key.

    Collisions are counted per window position and summed; the same value
    placed in two different windows may legitimately produce the same key.
    """

    key_bytes: int = 8
    window_bits: int = 20
    kind = "window"
    randomized = False
    distribution_supported = False

    def __post_init__(self):
        if self.window_bits >= self.key_bytes * 8:
            raise ValueError("window must be narrower than the key")

    @property
    def positions(self) -> int:
        return self.key_bytes * 8

    def count(self) -> int:
        return self.positions << self.window_bits

    def group_messages(self, position: int):
        bits = self.key_bytes * 8
        mask = (1 << bits) - 1
        for v in range(1 << self.window_bits):
            k = ((v << position) | (v >> (bits - position))) & mask if position else v
            yield k.to_bytes(self.key_bytes, "little")

    def group_array(self, position: int) -> np.ndarray:
        """(2^window_bits, key_bytes) uint8 rows, equal to group_messages."""
        if self.key_bytes != 8:
            raise ValueError("vectorized windows need 8-byte keys")
        v = np.arange(1 << self.window_bits, dtype=np.uint64)
        if position:
            k = (v << np.uint64(position)) | (v >> np.uint64(64 - position))
        else:
            k = v
        return k.astype("<u8").view(np.uint8).reshape(-1, self.key_bytes)

    def messages(self, seed: int = 0):
        for position in range(self.positions):
            yield from self.group_messages(position)


@dataclass(frozen=True)
class Zeros:
    """All-zero messages of every length 0..max_len-1 inclusive."""

    max_len: int = 65536
    kind = "zeros"
    randomized = False
    distribution_supported = True

    def count(self) -> int:
        return self.max_len

    def messages(self, seed: int = 0):
        for length in range(self.max_len):
            yield bytes(length)


KEYSET_TYPES = {c.kind: c for c in (Cyclic, TwoBytes, Sparse, Permutation, Window, Zeros)}


# ----------------------------------------------------------- scale presets

_DESK = dict(
    cyclic=dict(pattern_bytes=8, repeats=8, samples=100_000),
    twobytes=dict(max_len=8),
    sparse=dict(msg_bits=512, max_set_bits=3),
    permutation=dict(blocks=PERMUTATION_BLOCKS),
    window=dict(key_bytes=8, window_bits=20),
    zeros=dict(max_len=65536),
    avalanche=dict(msg_len_bytes=32, samples=100_000),
    differential=dict(key_bytes=8, n_bits=1, pairs_per_subset=1000),
)

_SMALL = dict(
    cyclic=dict(pattern_bytes=8, repeats=8, samples=10_000),
    twobytes=dict(max_len=4),
    sparse=dict(msg_bits=64, max_set_bits=2),
    permutation=dict(blocks=PERMUTATION_BLOCKS[:6]),
    window=dict(key_bytes=8, window_bits=12),
    zeros=dict(max_len=4096),
    avalanche=dict(msg_len_bytes=32, samples=10_000),
    differential=dict(key_bytes=8, n_bits=1, pairs_per_subset=100),
)

SCALES = {"desk": _DESK, "small": _SMALL}


def battery_params(scale: str) -> dict:
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}; choose from {sorted(SCALES)}")
    return SCALES[scale]


def keyset_for(test: str, scale: str = "desk"):
    """The battery's keyset spec for a keyset test name at a given scale."""
    params = battery_params(scale)
    if test not in KEYSET_TYPES:
        raise ValueError(f"{test!r} is not a keyset test")
    return KEYSET_TYPES[test](**params[test])


# ------------------------------------------------------------ hash access


def _resolve(hash_spec):
    """Accept a registry name or a zero-argument hasher factory.

    Returns (name or None, factory, one_shot_digest, digest_bytes).
    """
    if isinstance(hash_spec, str):
        name = hash_spec
        factory = lambda: hashes.new(name)
        if name in hashes.SPECK_KINDS:
            from .construct import DM_SPECK128, MMO_SPECK128, MP_SPECK128
            from .construct import hash_message

            c = {"dm-speck128": DM_SPECK128, "mmo-speck128": MMO_SPECK128,
                 "mp-speck128": MP_SPECK128}[name]
            one_shot = lambda m: hash_message(c, m)
        else:
            import hashlib

            backend = {"md5": hashlib.md5,
                       "blake2s": lambda d=b"": hashlib.blake2s(d, digest_size=32)}[name]
            one_shot = lambda m: backend(m).digest()
        return name, factory, one_shot, hashes.new(name).digest_size
    factory = hash_spec
    probe = factory()

    def one_shot(m):
        h = factory()
        h.update(m)
        return h.digest()

    return getattr(probe, "name", None), factory, one_shot, probe.digest_size


def _speck_kind(name):
    return hashes.SPECK_KINDS.get(name) if name else None


# ------------------------------------------------------- digest matrices


def _check_budget(count: int, digest_size: int, budget_bytes: int):
    need = count * digest_size * 2  # matrix + sort copy
    if need > budget_bytes:
        raise CapacityError(
            f"keyset of {count} digests needs ~{need >> 20} MiB, "
            f"budget is {budget_bytes >> 20} MiB"
        )


def _digest_matrix_speck(kind: str, message_iter, count: int) -> np.ndarray:
    """Vectorized digests for equal-width lanes, grouped by padded length.

    Row order is NOT preserved; callers only do multiset statistics.
    """
    out = np.empty((count, 16), dtype=np.uint8)
    write = 0
    pending: dict[int, list[bytes]] = {}
    pending_n = 0

    def flush():
        nonlocal write, pending, pending_n
        for padded_len, msgs in pending.items():
            buf = b"".join(m + bytes(padded_len - len(m)) for m in msgs)
            arr = np.frombuffer(buf, dtype=np.uint8).reshape(len(msgs), padded_len)
            digs = digests128_batch(kind, arr).astype("<u8")
            out[write : write + len(msgs)] = digs.view(np.uint8).reshape(len(msgs), 16)
            write += len(msgs)
        pending = {}
        pending_n = 0

    for m in message_iter:
        padded = max(16, -(-len(m) // 16) * 16)
        pending.setdefault(padded, []).append(m)
        pending_n += 1
        if pending_n >= _CHUNK:
            flush()
    flush()
    assert write == count
    return out


def _digest_matrix_generic(one_shot, digest_size: int, message_iter, count: int) -> np.ndarray:
    buf = bytearray(count * digest_size)
    pos = 0
    for m in message_iter:
        buf[pos : pos + digest_size] = one_shot(m)
        pos += digest_size
    assert pos == len(buf)
    return np.frombuffer(bytes(buf), dtype=np.uint8).reshape(count, digest_size)


def _digest_matrix(hash_spec, message_iter, count: int, budget_bytes: int) -> np.ndarray:
    name, _factory, one_shot, digest_size = _resolve(hash_spec)
    _check_budget(count, digest_size, budget_bytes)
    kind = _speck_kind(name)
    if kind:
        return _digest_matrix_speck(kind, message_iter, count)
    return _digest_matrix_generic(one_shot, digest_size, message_iter, count)


def _zeros_digest_matrix(hash_spec, max_len: int, budget_bytes: int) -> np.ndarray:
    """Prefix-stream path: all-zero messages are prefixes of one stream,
    so one streaming state plus per-length snapshot finalization covers
    the whole keyset in O(max_len/fragment) compressions."""
    _name, factory, _one_shot, digest_size = _resolve(hash_spec)
    _check_budget(max_len, digest_size, budget_bytes)
    h = factory()
    zero = bytes(1)
    buf = bytearray(max_len * digest_size)
    for length in range(max_len):
        # digest() finalizes a snapshot; the stream itself stays open
        buf[length * digest_size : (length + 1) * digest_size] = h.digest()
        h.update(zero)
    return np.frombuffer(buf, dtype=np.uint8).reshape(max_len, digest_size).copy()


# --------------------------------------------------------- multiset stats


def _distinct_count(mat: np.ndarray) -> int:
    if len(mat) == 0:
        return 0
    if mat.shape[1] % 8:
        wide = np.zeros((len(mat), mat.shape[1] + 8 - mat.shape[1] % 8), dtype=np.uint8)
        wide[:, : mat.shape[1]] = mat
        mat = wide
    words = np.ascontiguousarray(mat).view("<u8")
    order = np.lexsort(tuple(words[:, j] for j in range(words.shape[1] - 1, -1, -1)))
    s = words[order]
    changed = np.any(s[1:] != s[:-1], axis=1)
    return 1 + int(changed.sum())


def _bit_bias_pct(mat: np.ndarray) -> float:
    n = len(mat)
    counts = np.zeros(mat.shape[1] * 8, dtype=np.int64)
    for start in range(0, n, 1 << 20):
        part = mat[start : start + (1 << 20)]
        counts += np.unpackbits(part, axis=1, bitorder="little").sum(axis=0, dtype=np.int64)
    p = counts / n
    return float(np.max(np.abs(2.0 * p - 1.0)) * 100.0)


@dataclass(frozen=True)
class KeysetResult:
    test: str
    sample_count: int
    collisions: int
    distribution_bias_pct: "float | None"


def gen_keyset(spec, seed: int = 0, budget_bytes: int = DEFAULT_BUDGET_BYTES):
    """The spec's deterministic message stream (after a capacity check)."""
    _check_budget(spec.count(), 16, budget_bytes)
    return spec.messages(seed)


def keyset_stats(hash_spec, spec, seed: int = 0,
                 budget_bytes: int = DEFAULT_BUDGET_BYTES,
                 _force_generic: bool = False) -> KeysetResult:
    """One hashing pass giving both collisions and distribution bias."""
    if isinstance(spec, Window):
        kind = _speck_kind(_resolve(hash_spec)[0])
        group_n = 1 << spec.window_bits
        collisions = 0
        for position in range(spec.positions):
            if kind and spec.key_bytes == 8:
                _check_budget(group_n, 16, budget_bytes)
                padded = np.zeros((group_n, 16), dtype=np.uint8)
                padded[:, :8] = spec.group_array(position)
                mat = (digests128_batch(kind, padded).astype("<u8")
                       .view(np.uint8).reshape(group_n, 16))
            else:
                mat = _digest_matrix(hash_spec, spec.group_messages(position),
                                     group_n, budget_bytes)
            collisions += len(mat) - _distinct_count(mat)
        return KeysetResult("window", spec.count(), collisions, None)
    if isinstance(spec, Zeros) and not _force_generic:
        mat = _zeros_digest_matrix(hash_spec, spec.max_len, budget_bytes)
    else:
        mat = _digest_matrix(hash_spec, gen_keyset(spec, seed, budget_bytes),
                             spec.count(), budget_bytes)
    bias = _bit_bias_pct(mat) if spec.distribution_supported else None
    return KeysetResult(spec.kind, len(mat), len(mat) - _distinct_count(mat), bias)


def count_collisions(hash_spec, spec, seed: int = 0,
                     budget_bytes: int = DEFAULT_BUDGET_BYTES) -> int:
    """collisions = sample_count - distinct digests, multiplicity counted."""
    return keyset_stats(hash_spec, spec, seed, budget_bytes).collisions


def distribution_bias(hash_spec, spec, seed: int = 0,
                      budget_bytes: int = DEFAULT_BUDGET_BYTES) -> float:
    if not spec.distribution_supported:
        raise ValueError(f"distribution is not defined for the {spec.kind} test")
    if spec.count() < 1000:
        raise ValueError("distribution bias needs at least 1000 samples")
    bias = keyset_stats(hash_spec, spec, seed, budget_bytes).distribution_bias_pct
    assert bias is not None
    return bias


# -------------------------------------------------------------- avalanche


def avalanche_bias(hash_spec, msg_len_bytes: int = 32, samples: int = 100_000,
                   seed: int = 0) -> float:
    """Worst-case |2*p_ij - 1|*100 over all (input bit i, output bit j)
    flip-probability estimates from `samples` random messages."""
    if samples < 10_000:
        raise ValueError("avalanche estimation needs at least 10^4 samples")
    name, _factory, one_shot, digest_size = _resolve(hash_spec)
    base = np.frombuffer(
        random_bytes(derive_seed(seed, "avalanche"), samples * msg_len_bytes),
        dtype=np.uint8,
    ).reshape(samples, msg_len_bytes).copy()
    kind = _speck_kind(name)
    in_bits = msg_len_bytes * 8
    out_bits = digest_size * 8
    counts = np.empty((in_bits, out_bits), dtype=np.int64)

    if kind:
        padded = max(16, -(-msg_len_bytes // 16) * 16)
        work = np.zeros((samples, padded), dtype=np.uint8)
        work[:, :msg_len_bytes] = base
        base_d = digests128_batch(kind, work).astype("<u8").view(np.uint8).reshape(samples, 16)
        for bit in range(in_bits):
            byte, mask = bit >> 3, np.uint8(1 << (bit & 7))
            work[:, byte] ^= mask
            d = digests128_batch(kind, work).astype("<u8").view(np.uint8).reshape(samples, 16)
            work[:, byte] ^= mask
            counts[bit] = np.unpackbits(d ^ base_d, axis=1, bitorder="little").sum(
                axis=0, dtype=np.int64
            )
    else:
        stride = msg_len_bytes
        flat = base.tobytes()
        base_d = _digest_matrix_generic(
            one_shot, digest_size,
            (flat[i : i + stride] for i in range(0, len(flat), stride)), samples,
        )
        for bit in range(in_bits):
            byte, mask = bit >> 3, 1 << (bit & 7)
            flipped = base.copy()
            flipped[:, byte] ^= mask
            fb = flipped.tobytes()
            d = _digest_matrix_generic(
                one_shot, digest_size,
                (fb[i : i + stride] for i in range(0, len(fb), stride)), samples,
            )
            counts[bit] = np.unpackbits(d ^ base_d, axis=1, bitorder="little").sum(
                axis=0, dtype=np.int64
            )

    p = counts / samples
    return float(np.max(np.abs(2.0 * p - 1.0)) * 100.0)


# ------------------------------------------------------------ differential


def differential_test(hash_spec, key_bytes: int = 8, n_bits: int = 1,
                      pairs_per_subset: int = 1000, seed: int = 0) -> int:
    """Hash pairs differing in exactly each n_bits-subset of positions;
    count equal-digest pairs over all subsets."""
    if n_bits not in (1, 2):
        raise ValueError("n_bits must be 1 or 2 at this scale")
    name, _factory, one_shot, digest_size = _resolve(hash_spec)
    positions = key_bytes * 8
    subsets = list(itertools.combinations(range(positions), n_bits))
    total = len(subsets) * pairs_per_subset
    base = np.frombuffer(
        random_bytes(derive_seed(seed, "differential"), total * key_bytes), dtype=np.uint8
    ).reshape(total, key_bytes).copy()

    masks = np.zeros((len(subsets), key_bytes), dtype=np.uint8)
    for row, subset in enumerate(subsets):
        for bit in subset:
            masks[row, bit >> 3] |= 1 << (bit & 7)
    flipped = base ^ np.repeat(masks, pairs_per_subset, axis=0)

    kind = _speck_kind(name)
    if kind:
        padded = max(16, -(-key_bytes // 16) * 16)
        wa = np.zeros((total, padded), dtype=np.uint8)
        wa[:, :key_bytes] = base
        wb = np.zeros((total, padded), dtype=np.uint8)
        wb[:, :key_bytes] = flipped
        da = digests128_batch(kind, wa)
        db = digests128_batch(kind, wb)
        return int(np.all(da == db, axis=1).sum())

    stride = key_bytes
    fa, fb = base.tobytes(), flipped.tobytes()
    equal = 0
    for i in range(0, len(fa), stride):
        if one_shot(fa[i : i + stride]) == one_shot(fb[i : i + stride]):
            equal += 1
    return equal


# ---------------------------------------------------------- birthday bound


@dataclass(frozen=True)
class CollisionModel:
    k: int
    n: int

    def __post_init__(self):
        if self.k < 0 or self.n < 1:
            raise ValueError("need k >= 0 and n >= 1")

    def probability(self) -> float:
        return collision_probability(self.k, self.n)


def collision_probability(k: int, n: int) -> float:
    """Birthday approximation P ~ 1 - exp(-k(k-1)/(2n)), clamped to [0,1]."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if k < 2:
        return 0.0
    p = -math.expm1(-(k * (k - 1)) / (2.0 * n))
    return min(1.0, max(0.0, p))


# ------------------------------------------------------------- the battery


@dataclass(frozen=True)
class BatteryRow:
    """One (hash, test) outcome, the unit the quality report is made of."""

    hash_name: str
    test: str
    sample_count: int
    collisions: "int | None"
    distribution_bias_pct: "float | None"
    avalanche_bias_pct: "float | None"
    params: dict = field(default_factory=dict)


def run_battery(hash_names=DEFAULT_QUALITY_HASHES, tests=TEST_NAMES,
                scale: str = "desk", seed: int = 0,
                budget_bytes: int = DEFAULT_BUDGET_BYTES) -> list[BatteryRow]:
    params = battery_params(scale)
    rows = []
    for hash_name in hash_names:
        if isinstance(hash_name, str) and hash_name not in hashes.HASH_NAMES:
            raise ValueError(f"unknown hash {hash_name!r}")
        for test in tests:
            if test not in TEST_NAMES:
                raise ValueError(f"unknown test {test!r}")
            child = derive_seed(seed, hash_name, test)
            if test == "avalanche":
                bias = avalanche_bias(hash_name, seed=child, **params["avalanche"])
                rows.append(BatteryRow(hash_name, test, params["avalanche"]["samples"],
                                       None, None, bias, dict(params["avalanche"])))
            elif test == "differential":
                p = params["differential"]
                collisions = differential_test(hash_name, seed=child, **p)
                pairs = math.comb(p["key_bytes"] * 8, p["n_bits"]) * p["pairs_per_subset"]
                rows.append(BatteryRow(hash_name, test, pairs, collisions, None, None, dict(p)))
            else:
                spec = keyset_for(test, scale)
                r = keyset_stats(hash_name, spec, seed=child, budget_bytes=budget_bytes)
                rows.append(BatteryRow(hash_name, test, r.sample_count, r.collisions,
                                       r.distribution_bias_pct, None, dict(params[test])))
    return rows
