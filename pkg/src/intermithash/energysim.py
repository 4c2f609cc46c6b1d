"""Intermittent-power simulator for an RF-harvesting device.

A reservoir capacitor charges from a harvester; a boost regulator starts
the load at V_on and cuts it off at V_off.  The window between the two
thresholds holds

    E_ipc = 1/2 * C * (V_on - V_off)^2            (energy per power cycle)
    N_ck  = floor(E_ipc / P_load * f_CPU)         (cycles per power cycle)

The reservoir is integrated in the energy domain, dE/dt = P_harvest -
P_state, with a linear energy<->voltage map E(V) = 1/2*C*(V_on - V_off)*V.
The linear map is chosen so the V_on..V_off window carries exactly E_ipc:
discharging it at P_load yields the cycle count above, which is the
property the rest of the package (and its acceptance tests) depend on.
Thresholds and traces stay in volts; V is clamped to [0, V_max].

Two execution policies run a task over this supply:

    Continuous  executes from the program entry point every power cycle;
                a brownout loses all progress.
    IEM         guards against brownout: at V <= V_guard it checkpoints
                (paying checkpoint_cost_cycles), sleeps at P_sleep, and
                resumes at V >= V_wake (paying restore_cost_cycles).
                Memory persists through sleep, so progress continues
                where it stopped; only a brownout reverts to the last
                committed checkpoint.  Checkpoint commits are atomic:
                a brownout mid-write leaves the previous commit intact,
                and commits land on checkpoint_granularity multiples.

Two engines share this model.  simulate_trace is a fixed-step explicit
integrator producing V(t) samples for plots and CSV export.  run_task,
success_rate and cycle_histogram use the exact event-driven solution of
the same piecewise-constant-power dynamics (closed-form segment times),
which keeps thousands of trials cheap; the test suite cross-checks the
two engines against each other.

Noisy harvest power draws one realization per trial or trace (modeling
per-attempt tag placement and channel conditions) and holds it constant
within the trial.  Per-step redraws would let a restart policy succeed by
waiting for a lucky cycle, which is not how a stationary deployment
behaves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import SplitMix64, derive_seed

__all__ = [
    "EnergyParams",
    "ConstantPower",
    "NoisyPower",
    "DistanceScaledPower",
    "TaskSpec",
    "Continuous",
    "IEM",
    "SimOutcome",
    "TraceResult",
    "energy_per_ipc",
    "cycles_per_ipc",
    "ipc_cycles_at",
    "distance_to_power",
    "simulate_trace",
    "run_task",
    "success_rate",
    "cycle_histogram",
    "CycleHistogram",
    "success_sweep",
    "SweepPoint",
    "load_params",
    "save_params",
    "default_params",
    "default_task",
    "PARAM_KEYS",
    "DEFAULT_SWEEP_DISTANCES",
    "MID_RANGE_DISTANCE_M",
    "LOW_POWER_DISTANCE_M",
    "SWEEP_P_REF_W",
    "SWEEP_D_REF_M",
    "SWEEP_SIGMA",
    "DEFAULT_TIMEOUT_S",
    "CYCLES_PER_COMPRESSION",
    "DEFAULT_TASK_CYCLES",
]

_MAX_EVENTS = 1_000_000


# ------------------------------------------------------------- parameters


@dataclass(frozen=True)
class EnergyParams:
    """Reservoir, regulator, and load constants."""

    c_f: float
    v_on: float
    v_off: float
    v_max: float
    p_load_w: float
    p_sleep_w: float
    p_leak_w: float
    f_cpu_hz: float

    def __post_init__(self):
        values = [self.c_f, self.v_on, self.v_off, self.v_max,
                  self.p_load_w, self.p_sleep_w, self.p_leak_w, self.f_cpu_hz]
        if not all(math.isfinite(v) for v in values):
            raise ValueError("parameters must be finite")
        if not self.v_on > self.v_off > 0:
            raise ValueError("need v_on > v_off > 0")
        if self.c_f <= 0:
            raise ValueError("capacitance must be positive")
        if not self.p_load_w > self.p_sleep_w >= 0:
            raise ValueError("need p_load > p_sleep >= 0")
        if self.p_leak_w < 0:
            raise ValueError("leakage must be nonnegative")
        if self.f_cpu_hz <= 0:
            raise ValueError("cpu frequency must be positive")
        if self.v_max < self.v_on:
            raise ValueError("need v_max >= v_on")

    @property
    def energy_slope(self) -> float:
        """Joules per volt of the linear energy<->voltage map."""
        return 0.5 * self.c_f * (self.v_on - self.v_off)

    def energy_at(self, v: float) -> float:
        return self.energy_slope * v

    def voltage_at(self, e: float) -> float:
        return e / self.energy_slope


def energy_per_ipc(params: EnergyParams) -> float:
    """Energy delivered to the load across one V_on -> V_off discharge."""
    return 0.5 * params.c_f * (params.v_on - params.v_off) ** 2


def cycles_per_ipc(params: EnergyParams) -> int:
    """Clock cycles available per power cycle with no harvest inflow."""
    return math.floor(energy_per_ipc(params) / params.p_load_w * params.f_cpu_hz)


def ipc_cycles_at(params: EnergyParams, p_harvest_w: float) -> float:
    """Cycles per power cycle when the harvester contributes during
    discharge; infinite once inflow sustains the load."""
    net = params.p_load_w - p_harvest_w
    if net <= 0:
        return math.inf
    return energy_per_ipc(params) / net * params.f_cpu_hz


# --------------------------------------------------------------- profiles


def distance_to_power(d_m: float, p_ref_w: float, d_ref_m: float) -> float:
    """Free-space inverse-square mapping from reader distance to power."""
    if d_m <= 0:
        raise ValueError("distance must be positive")
    if d_ref_m <= 0 or p_ref_w < 0:
        raise ValueError("reference point must be valid")
    return p_ref_w * (d_ref_m / d_m) ** 2


@dataclass(frozen=True)
class ConstantPower:
    p_w: float

    def __post_init__(self):
        if self.p_w < 0 or not math.isfinite(self.p_w):
            raise ValueError("power must be finite and nonnegative")

    def realize(self, seed: int = 0) -> float:
        return self.p_w


@dataclass(frozen=True)
class NoisyPower:
    """Gaussian relative noise around a mean, one draw per realization."""

    mean_w: float
    sigma_frac: float
    seed: int = 0

    def __post_init__(self):
        if self.mean_w < 0 or self.sigma_frac < 0:
            raise ValueError("mean and sigma must be nonnegative")

    def realize(self, seed: int = 0) -> float:
        g = SplitMix64(derive_seed(self.seed, seed, "harvest")).next_gauss()
        return max(0.0, self.mean_w * (1.0 + self.sigma_frac * g))


@dataclass(frozen=True)
class DistanceScaledPower:
    p_ref_w: float
    d_ref_m: float
    d_m: float

    @property
    def p_w(self) -> float:
        return distance_to_power(self.d_m, self.p_ref_w, self.d_ref_m)

    def realize(self, seed: int = 0) -> float:
        return self.p_w


# ---------------------------------------------------------- task and policy


@dataclass(frozen=True)
class TaskSpec:
    total_cycles: int
    checkpoint_granularity_cycles: int = 0
    checkpoint_cost_cycles: int = 0
    restore_cost_cycles: int = 0

    def __post_init__(self):
        if min(self.total_cycles, self.checkpoint_granularity_cycles,
               self.checkpoint_cost_cycles, self.restore_cost_cycles) < 0:
            raise ValueError("cycle counts must be nonnegative")
        if 0 < self.total_cycles < self.checkpoint_granularity_cycles:
            raise ValueError("granularity cannot exceed the task size")


@dataclass(frozen=True)
class Continuous:
    kind = "continuous"


@dataclass(frozen=True)
class IEM:
    """Sleep-below-guard policy; thresholds sit inside the supply window."""

    v_guard: float = 1.9
    v_wake: float = 2.4
    kind = "iem"

    def validate(self, params: EnergyParams):
        if not params.v_off < self.v_guard < self.v_wake <= params.v_on:
            raise ValueError("need v_off < v_guard < v_wake <= v_on")


# ----------------------------------------------------------------- outcomes


@dataclass
class SimOutcome:
    completed: bool
    wall_time_s: float
    active_cycles_executed: float
    restarts: int
    checkpoints: int
    ipc_list: list
    progress_trace: list = field(default_factory=list)


@dataclass
class TraceResult:
    """Fixed-step integration output: per-sample rows plus IPC records."""

    samples: list  # (t_s, v_cap, state, cycles_done) with cumulative cycles
    ipcs: list  # (start_s, end_s, cycles)
    p_harvest_w: float


# ------------------------------------------------------ fixed-step integrator


def simulate_trace(params: EnergyParams, profile, duration_s: float,
                   dt_s: float, seed: int = 0, v0: float = 0.0) -> TraceResult:
    """Explicit-step charge/discharge trace (no execution policy).

    The device is off below V_on (leak only) and drives the load from
    V_on down to V_off; each on-window is recorded as one IPC.
    """
    if not (math.isfinite(duration_s) and duration_s > 0):
        raise ValueError("duration must be positive and finite")
    if not (math.isfinite(dt_s) and dt_s > 0):
        raise ValueError("dt must be positive and finite")
    if not 0 <= v0 <= params.v_max:
        raise ValueError("v0 out of range")
    p_h = profile.realize(derive_seed(seed, "trace"))

    e = params.energy_at(v0)
    e_on = params.energy_at(params.v_on)
    e_off = params.energy_at(params.v_off)
    e_max = params.energy_at(params.v_max)
    f = params.f_cpu_hz

    state = "run" if e >= e_on else "off"
    cycles_done = 0.0
    ipcs = []
    ipc_start = 0.0 if state == "run" else None
    ipc_cycles = 0.0
    samples = [(0.0, v0, state, 0.0)]

    steps = int(round(duration_s / dt_s))
    t = 0.0
    for _ in range(steps):
        t += dt_s
        if state == "run":
            e += (p_h - params.p_load_w) * dt_s
            cycles_done += f * dt_s
            ipc_cycles += f * dt_s
            if e < e_off:
                ipcs.append((ipc_start, t, ipc_cycles))
                ipc_start, ipc_cycles = None, 0.0
                state = "off"
        else:
            e += (p_h - params.p_leak_w) * dt_s
            if e >= e_on:
                state = "run"
                ipc_start = t
        e = min(max(e, 0.0), e_max)
        samples.append((t, params.voltage_at(e), state, cycles_done))
    if state == "run":
        ipcs.append((ipc_start, t, ipc_cycles))
    return TraceResult(samples, ipcs, p_h)


# --------------------------------------------------------- event-driven engine


def run_task(params: EnergyParams, profile, task: TaskSpec, policy,
             timeout_s: float, seed: int = 0) -> SimOutcome:
    """Execute a task over the harvested supply until done or timed out.

    Exact event stepping: within each device state the power balance is
    constant, so the time to the next event (threshold crossing, task
    completion, timeout) is closed-form.
    """
    if not (math.isfinite(timeout_s) and timeout_s > 0):
        raise ValueError("timeout must be positive and finite")
    iem = isinstance(policy, IEM)
    if iem:
        policy.validate(params)
    p_h = profile.realize(seed)

    slope = params.energy_slope
    e_on = slope * params.v_on
    e_off = slope * params.v_off
    e_max = slope * params.v_max
    if iem:
        e_guard = slope * policy.v_guard
        e_wake = slope * policy.v_wake
    f = params.f_cpu_hz
    gran = task.checkpoint_granularity_cycles

    t, e = 0.0, 0.0
    executed = 0.0  # progress toward the task, in cycles
    committed = 0.0  # progress safe in nonvolatile storage
    overhead = 0.0  # restore cycles owed before progress resumes
    active_cycles = 0.0
    restarts = checkpoints = 0
    ipcs = []
    trace = [(0.0, 0.0)]
    state = "off"
    ipc_start = ipc_cycles = 0.0
    completed = False

    def close_ipc(now):
        nonlocal ipc_cycles
        ipcs.append((ipc_start, now, ipc_cycles))
        ipc_cycles = 0.0

    for _ in range(_MAX_EVENTS):
        if completed or t >= timeout_s:
            break

        if state == "off":
            rate = p_h - params.p_leak_w
            if rate <= 0:
                t = timeout_s
                break
            dt = (e_on - e) / rate
            if t + dt >= timeout_s:
                t = timeout_s
                break
            t += dt
            e = e_on
            state = "run"
            ipc_start = t
            if iem and committed > 0:
                overhead += task.restore_cost_cycles
            continue

        if state == "run":
            need = overhead + (task.total_cycles - executed)
            dt_done = need / f
            net = params.p_load_w - p_h
            dt_edge = math.inf
            if net > 0:
                edge = e_guard if iem else e_off
                dt_edge = max(e - edge, 0.0) / net
            dt_out = timeout_s - t
            dt = min(dt_done, dt_edge, dt_out)

            burn = f * dt
            spent_overhead = min(overhead, burn)
            overhead -= spent_overhead
            executed = min(executed + burn - spent_overhead, float(task.total_cycles))
            active_cycles += burn
            ipc_cycles += burn
            e = min(e - net * dt, e_max)
            t += dt
            trace.append((t, executed))

            if executed >= task.total_cycles and overhead == 0.0:
                completed = True
                close_ipc(t)
            elif dt == dt_out:
                t = timeout_s
            elif iem:
                state = "checkpoint"
            else:
                close_ipc(t)
                restarts += 1
                executed = 0.0
                trace.append((t, executed))
                state = "off"
            continue

        if state == "checkpoint":
            net = params.p_load_w - p_h
            dt = task.checkpoint_cost_cycles / f
            e_after = e - net * dt
            if t + dt >= timeout_s:
                t = timeout_s
                break
            if e_after < e_off:
                # brownout mid-write: previous commit survives
                dt_fail = (e - e_off) / net
                t += dt_fail
                active_cycles += f * dt_fail
                ipc_cycles += f * dt_fail
                close_ipc(t)
                restarts += 1
                executed = committed
                trace.append((t, executed))
                e = e_off
                state = "off"
            else:
                t += dt
                e = min(e_after, e_max)
                active_cycles += task.checkpoint_cost_cycles
                ipc_cycles += task.checkpoint_cost_cycles
                committed = (executed // gran) * gran if gran > 0 else executed
                checkpoints += 1
                close_ipc(t)
                state = "sleep"
            continue

        if state == "sleep":
            rate = p_h - params.p_sleep_w
            if rate > 0:
                dt = (e_wake - e) / rate
                if t + dt >= timeout_s:
                    t = timeout_s
                    break
                t += dt
                e = e_wake
                state = "run"
                ipc_start = t
                overhead += task.restore_cost_cycles
            else:
                if rate == 0:
                    t = timeout_s
                    break
                dt = (e - e_off) / -rate
                if t + dt >= timeout_s:
                    t = timeout_s
                    break
                t += dt
                e = e_off
                restarts += 1
                executed = committed
                trace.append((t, executed))
                state = "off"
            continue

    if not completed and state == "run" and ipc_cycles > 0:
        close_ipc(min(t, timeout_s))
    return SimOutcome(completed, min(t, timeout_s), active_cycles,
                      restarts, checkpoints, ipcs, trace)


def success_rate(params: EnergyParams, profile, task: TaskSpec, policy,
                 trials: int, seed: int = 0,
                 timeout_s: float = None) -> float:  # type: ignore[assignment]
    """Fraction of independent profile realizations that finish the task."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if timeout_s is None:
        timeout_s = DEFAULT_TIMEOUT_S
    done = 0
    for i in range(trials):
        outcome = run_task(params, profile, task, policy, timeout_s,
                           seed=derive_seed(seed, "trial", i))
        done += outcome.completed
    return done / trials


# ---------------------------------------------------------------- histogram


@dataclass
class CycleHistogram:
    bucket_lows: np.ndarray
    bucket_highs: np.ndarray
    counts: np.ndarray
    mean_cycles: float
    values: np.ndarray

    def rows(self):
        return list(zip(self.bucket_lows.tolist(), self.bucket_highs.tolist(),
                        self.counts.tolist()))


def cycle_histogram(params: EnergyParams, profile, trials: int, seed: int = 0,
                    buckets: int = 24) -> CycleHistogram:
    """Distribution of per-IPC available cycles across noisy trials.

    Trials whose realized inflow sustains the load indefinitely have no
    finite power cycle and are excluded from the buckets.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    values = []
    for i in range(trials):
        c = ipc_cycles_at(params, profile.realize(derive_seed(seed, "trial", i)))
        if math.isfinite(c):
            values.append(c)
    arr = np.array(values, dtype=np.float64)
    if len(arr) == 0:
        raise ValueError("no finite power cycles at this profile")
    counts, edges = np.histogram(arr, bins=buckets)
    return CycleHistogram(edges[:-1], edges[1:], counts, float(arr.mean()), arr)


# ------------------------------------------------------------- distance sweep

DEFAULT_SWEEP_DISTANCES = (0.25, 0.3, 0.35, 0.4, 0.5, 0.6, 0.8, 1.6, 3.2, 5.0)
MID_RANGE_DISTANCE_M = 0.4
LOW_POWER_DISTANCE_M = 0.6
SWEEP_P_REF_W = 1.55e-3
SWEEP_D_REF_M = 0.4
SWEEP_SIGMA = 0.10
DEFAULT_TIMEOUT_S = 12.0

# Task sizing: one fragment hashed = one compression call; the 1280-byte
# reference message costs 20 compressions, each budgeted at a fixed
# cycles-per-call constant for the simulated core.
CYCLES_PER_COMPRESSION = 31_040
DEFAULT_TASK_CYCLES = 20 * CYCLES_PER_COMPRESSION


def default_task(total_cycles: int = None) -> TaskSpec:  # type: ignore[assignment]
    if total_cycles is None:
        total_cycles = DEFAULT_TASK_CYCLES
    return TaskSpec(
        total_cycles=total_cycles,
        checkpoint_granularity_cycles=min(CYCLES_PER_COMPRESSION, total_cycles),
        checkpoint_cost_cycles=500,
        restore_cost_cycles=500,
    )


@dataclass(frozen=True)
class SweepPoint:
    distance_m: float
    p_mean_w: float
    continuous_rate: float
    iem_rate: float


def success_sweep(params: EnergyParams, task: TaskSpec = None,  # type: ignore[assignment]
                  distances=DEFAULT_SWEEP_DISTANCES, trials: int = 200,
                  seed: int = 0, p_ref_w: float = SWEEP_P_REF_W,
                  d_ref_m: float = SWEEP_D_REF_M, sigma: float = SWEEP_SIGMA,
                  timeout_s: float = DEFAULT_TIMEOUT_S,
                  iem: IEM = IEM()) -> list:
    """Success rates for both policies over a reader-distance sweep."""
    if task is None:
        task = default_task()
    points = []
    for d in distances:
        mean = distance_to_power(d, p_ref_w, d_ref_m)
        profile = NoisyPower(mean, sigma)
        cont = success_rate(params, profile, task, Continuous(), trials,
                            seed=seed, timeout_s=timeout_s)
        prot = success_rate(params, profile, task, iem, trials,
                            seed=seed, timeout_s=timeout_s)
        points.append(SweepPoint(d, mean, cont, prot))
    return points


# ----------------------------------------------------------- parameter files

PARAM_KEYS = ("capacitance_f", "v_on", "v_off", "v_max", "p_load_w",
              "p_sleep_w", "p_leak_w", "f_cpu_hz")

_FIELD_BY_KEY = {
    "capacitance_f": "c_f",
    "v_on": "v_on",
    "v_off": "v_off",
    "v_max": "v_max",
    "p_load_w": "p_load_w",
    "p_sleep_w": "p_sleep_w",
    "p_leak_w": "p_leak_w",
    "f_cpu_hz": "f_cpu_hz",
}


def load_params(path) -> EnergyParams:
    """Read the flat key-value calibration format (`key = value`, # comments)."""
    found = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _FIELD_BY_KEY:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            found[key] = float(value.strip())
    missing = [k for k in PARAM_KEYS if k not in found]
    if missing:
        raise ValueError(f"{path}: missing keys: {', '.join(missing)}")
    return EnergyParams(**{_FIELD_BY_KEY[k]: v for k, v in found.items()})


def save_params(params: EnergyParams, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# Simulator calibration parameters.\n")
        for key in PARAM_KEYS:
            fh.write(f"{key} = {getattr(params, _FIELD_BY_KEY[key])!r}\n")


def default_params() -> EnergyParams:
    """The calibration shipped with the package."""
    from importlib import resources

    ref = resources.files("intermithash").joinpath("data/default_params.txt")
    with resources.as_file(ref) as path:
        return load_params(path)
