"""Hash throughput measurement.

Two message classes are timed: Short (10 bytes, dominated by fixed setup
cost) and Long (1280 bytes, dominated by compression throughput).  Wall
time is the median of repeated one-shot hashes on a monotonic
nanosecond clock after warmup; the structural columns (compressions,
cipher_calls, state_bytes) are computed analytically so they are
bit-identical across runs and machines.  Messages are fixed pseudorandom
bytes per (hash, class, seed), so reruns time identical work.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from . import hashes
from .rng import derive_seed, random_bytes

__all__ = ["MSG_CLASSES", "BenchResult", "bench_message", "bench_hash", "bench_all"]

MSG_CLASSES = {"short": 10, "long": 1280}


@dataclass(frozen=True)
class BenchResult:
    hash_name: str
    msg_class: str
    ns_per_byte: float
    compressions: int
    cipher_calls: int
    state_bytes: int


def bench_message(hash_name: str, msg_class: str, seed: int = 0) -> bytes:
    """The deterministic input timed for a (hash, class, seed) cell."""
    if msg_class not in MSG_CLASSES:
        raise ValueError(f"unknown message class {msg_class!r}")
    size = MSG_CLASSES[msg_class]
    return random_bytes(derive_seed(seed, "bench", hash_name, msg_class), size)


def bench_hash(hash_name: str, msg_class: str, repetitions: int = 30,
               warmup: int = 5, seed: int = 0) -> BenchResult:
    if hash_name not in hashes.HASH_NAMES:
        raise ValueError(f"unknown hash {hash_name!r}")
    if repetitions < 1:
        raise ValueError("need at least one repetition")
    msg = bench_message(hash_name, msg_class, seed)
    size = len(msg)
    for _ in range(max(warmup, 0)):
        hashes.digest(hash_name, msg)
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter_ns()
        hashes.digest(hash_name, msg)
        samples.append(time.perf_counter_ns() - t0)
    return BenchResult(
        hash_name=hash_name,
        msg_class=msg_class,
        ns_per_byte=statistics.median(samples) / size,
        compressions=hashes.compression_count(hash_name, size),
        cipher_calls=hashes.cipher_call_count(hash_name, size),
        state_bytes=hashes.state_bytes(hash_name),
    )


def bench_all(hash_names=hashes.HASH_NAMES, classes=("short", "long"),
              repetitions: int = 30, warmup: int = 5, seed: int = 0):
    return [
        bench_hash(name, cls, repetitions, warmup, seed)
        for name in hash_names
        for cls in classes
    ]
