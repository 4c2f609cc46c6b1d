"""Block-cipher hash constructions, a hash-quality battery, and an
intermittent-power simulator.

The package has three layers:

* hashes — Speck-based Davies-Meyer / Matyas-Meyer-Oseas / Miyaguchi-
  Preneel constructions plus MD5 and BLAKE2s references, all behind one
  streaming interface (`new`, `digest`, `hexdigest`).
* quality — keyset generators, collision counting, bit-distribution and
  avalanche bias, and key-differential testing (`run_battery`).
* energysim — capacitor-backed energy model with continuous and
  checkpointing execution policies (`run_task`, `success_rate`,
  `success_sweep`).

`intermithash --help` shows the command-line entry points; reports are
CSV or JSON and deterministic for a fixed seed.
"""

from .bench import BenchResult, bench_all, bench_hash
from .energysim import (
    IEM,
    ConstantPower,
    Continuous,
    DistanceScaledPower,
    EnergyParams,
    NoisyPower,
    SimOutcome,
    TaskSpec,
    cycle_histogram,
    cycles_per_ipc,
    default_params,
    default_task,
    distance_to_power,
    energy_per_ipc,
    load_params,
    run_task,
    simulate_trace,
    success_rate,
    success_sweep,
)
from .hashes import HASH_NAMES, digest, hexdigest, new
from .quality import (
    CapacityError,
    avalanche_bias,
    collision_probability,
    count_collisions,
    differential_test,
    distribution_bias,
    gen_keyset,
    run_battery,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "HASH_NAMES",
    "new",
    "digest",
    "hexdigest",
    "BenchResult",
    "bench_hash",
    "bench_all",
    "CapacityError",
    "gen_keyset",
    "count_collisions",
    "distribution_bias",
    "avalanche_bias",
    "differential_test",
    "collision_probability",
    "run_battery",
    "EnergyParams",
    "TaskSpec",
    "ConstantPower",
    "NoisyPower",
    "DistanceScaledPower",
    "Continuous",
    "IEM",
    "SimOutcome",
    "energy_per_ipc",
    "cycles_per_ipc",
    "distance_to_power",
    "simulate_trace",
    "run_task",
    "success_rate",
    "success_sweep",
    "cycle_histogram",
    "load_params",
    "default_params",
    "default_task",
]
