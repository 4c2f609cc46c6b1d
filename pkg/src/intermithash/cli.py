"""Command-line interface.

    intermithash hash <name> [FILE]
    intermithash bench [--class short|long|both] [--reps N]
    intermithash quality [--hash NAME ...] [--test NAME ...]
    intermithash simulate [--params FILE] [--policy continuous|iem]
                          [--task-cycles N] [--trials N]

Report subcommands share --seed, --format {csv,json}, --out PATH, and
--plot (render a PNG next to the delimited output).  The seed defaults
to the INTERMITHASH_SEED environment variable, then 0; the --seed flag
wins over both.  Exit status: 0 on success, 1 on runtime/IO failures
(unreadable or malformed files, memory budget), 2 on usage errors
(unknown names, bad option values, empty result selections).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bench as bench_mod
from . import energysim, hashes, quality, reports

__all__ = ["main", "build_parser", "ENV_SEED"]

ENV_SEED = "INTERMITHASH_SEED"
_READ_CHUNK = 1 << 16


class _RuntimeFailure(Exception):
    """Failures that exit with status 1 rather than a usage error."""


def _resolve_seed(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get(ENV_SEED)
    if env is None:
        return 0
    try:
        return int(env, 0)
    except ValueError:
        raise ValueError(f"{ENV_SEED} must be an integer, got {env!r}") from None


def _figure_path(out_path, default_stem: str) -> str:
    if out_path is None:
        return default_stem + ".png"
    stem, _ = os.path.splitext(str(out_path))
    return (stem or str(out_path)) + ".png"


# ------------------------------------------------------------- subcommands


def _cmd_hash(args, seed: int) -> int:
    name = args.name
    if name not in hashes.HASH_NAMES:
        raise ValueError(
            f"unknown hash {name!r}; choose from {', '.join(hashes.HASH_NAMES)}")
    hasher = hashes.new(name)
    if args.file is None or args.file == "-":
        stream = sys.stdin.buffer
        while chunk := stream.read(_READ_CHUNK):
            hasher.update(chunk)
    else:
        try:
            with open(args.file, "rb") as fh:
                while chunk := fh.read(_READ_CHUNK):
                    hasher.update(chunk)
        except OSError as exc:
            raise _RuntimeFailure(str(exc)) from None
    sys.stdout.write(hasher.hexdigest() + "\n")
    return 0


def _cmd_bench(args, seed: int) -> int:
    classes = ("short", "long") if args.msg_class == "both" else (args.msg_class,)
    names = tuple(args.hash) if args.hash else hashes.HASH_NAMES
    results = bench_mod.bench_all(names, classes, args.reps, args.warmup, seed)
    reports.emit(reports.render_bench(results, args.format), args.out)
    if args.plot:
        from . import figures

        figures.plot_bench(results, _figure_path(args.out, "bench"))
    return 0


def _cmd_quality(args, seed: int) -> int:
    names = tuple(args.hash) if args.hash else quality.DEFAULT_QUALITY_HASHES
    tests = tuple(args.test) if args.test else quality.TEST_NAMES
    rows = quality.run_battery(names, tests, scale=args.scale, seed=seed)
    reports.emit(reports.render_quality(rows, args.format), args.out)
    if args.plot:
        from . import figures

        figures.plot_quality(rows, _figure_path(args.out, "quality"))
    return 0


def _cmd_simulate(args, seed: int) -> int:
    if args.params is None:
        params = energysim.default_params()
    else:
        try:
            params = energysim.load_params(args.params)
        except OSError as exc:
            raise _RuntimeFailure(str(exc)) from None
        except ValueError as exc:
            raise _RuntimeFailure(f"bad params file {args.params}: {exc}") from None

    task = energysim.default_task(args.task_cycles)
    p_mean = energysim.distance_to_power(
        args.distance, energysim.SWEEP_P_REF_W, energysim.SWEEP_D_REF_M)
    if args.sigma > 0:
        profile = energysim.NoisyPower(p_mean, args.sigma)
    else:
        profile = energysim.ConstantPower(p_mean)

    if args.sweep:
        points = energysim.success_sweep(
            params, task, trials=args.trials, seed=seed, sigma=args.sigma,
            timeout_s=args.timeout)
        reports.emit(reports.render_sweep(points, args.format), args.out)
        if args.plot:
            from . import figures

            figures.plot_sweep(points, _figure_path(args.out, "simulate"))
    else:
        if args.policy == "continuous":
            policies = [energysim.Continuous()]
        elif args.policy == "iem":
            policies = [energysim.IEM()]
        else:
            policies = [energysim.Continuous(), energysim.IEM()]
        summaries = []
        for policy in policies:
            rate = energysim.success_rate(
                params, profile, task, policy, args.trials, seed=seed,
                timeout_s=args.timeout)
            summaries.append({
                "policy": policy.kind,
                "distance_m": args.distance,
                "p_mean_w": p_mean,
                "task_cycles": task.total_cycles,
                "trials": args.trials,
                "successes": round(rate * args.trials),
                "success_rate": rate,
            })
        reports.emit(reports.render_simulate(summaries, args.format), args.out)
        if args.plot:
            from . import figures

            figures.plot_simulate(summaries, _figure_path(args.out, "simulate"))

    if args.trace_out:
        trace = energysim.simulate_trace(
            params, profile, args.duration, args.dt, seed=seed)
        reports.emit(reports.render_trace(trace, args.format), args.trace_out)
        if args.plot:
            from . import figures

            figures.plot_trace(trace, _figure_path(args.trace_out, "trace"))

    if args.hist_out:
        hist = energysim.cycle_histogram(params, profile, args.trials, seed=seed)
        reports.emit(reports.render_histogram(hist, args.format), args.hist_out)
        if args.plot:
            from . import figures

            figures.plot_histogram(hist, _figure_path(args.hist_out, "histogram"))
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default: ${ENV_SEED} or 0)")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="report format (default: csv)")
    common.add_argument("--out", metavar="PATH", default=None,
                        help="write the report to PATH instead of stdout")
    common.add_argument("--plot", action="store_true",
                        help="also render a PNG figure next to the report")

    parser = argparse.ArgumentParser(
        prog="intermithash",
        description="Block-cipher hash constructions, a hash-quality "
                    "battery, and an intermittent-power simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_hash = sub.add_parser("hash", help="hash a file or stdin")
    p_hash.add_argument("name", metavar="NAME",
                        help=f"one of: {', '.join(hashes.HASH_NAMES)}")
    p_hash.add_argument("file", metavar="FILE", nargs="?", default=None,
                        help="input file ('-' or omitted: stdin)")
    p_hash.set_defaults(func=_cmd_hash)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="time every hash on fixed messages")
    p_bench.add_argument("--class", dest="msg_class",
                         choices=("short", "long", "both"), default="both",
                         help="message class to time (default: both)")
    p_bench.add_argument("--reps", type=int, default=30, metavar="N",
                         help="timed repetitions per cell (default: 30)")
    p_bench.add_argument("--warmup", type=int, default=5, metavar="N",
                         help="untimed repetitions per cell (default: 5)")
    p_bench.add_argument("--hash", action="append", metavar="NAME",
                         help="restrict to this hash (repeatable)")
    p_bench.set_defaults(func=_cmd_bench)

    p_quality = sub.add_parser("quality", parents=[common],
                               help="run the collision/bias battery")
    p_quality.add_argument("--hash", action="append", metavar="NAME",
                           help="hash to test (repeatable; default: "
                                + ", ".join(quality.DEFAULT_QUALITY_HASHES)
                                + ")")
    p_quality.add_argument("--test", action="append", metavar="NAME",
                           help="test to run (repeatable; default: all of "
                                + ", ".join(quality.TEST_NAMES) + ")")
    p_quality.add_argument("--scale", choices=("desk", "small"),
                           default="desk",
                           help="battery size preset (default: desk)")
    p_quality.set_defaults(func=_cmd_quality)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="run the intermittent-power simulator")
    p_sim.add_argument("--params", metavar="FILE", default=None,
                       help="circuit parameter file (default: built-in "
                            "calibration)")
    p_sim.add_argument("--policy", choices=("continuous", "iem"),
                       default=None,
                       help="execution policy (default: report both)")
    p_sim.add_argument("--task-cycles", type=int, default=None, metavar="N",
                       help="task length in CPU cycles (default: "
                            f"{energysim.DEFAULT_TASK_CYCLES})")
    p_sim.add_argument("--trials", type=int, default=200, metavar="N",
                       help="noisy trials per data point (default: 200)")
    p_sim.add_argument("--distance", type=float,
                       default=energysim.MID_RANGE_DISTANCE_M, metavar="M",
                       help="harvester distance in metres (default: "
                            f"{energysim.MID_RANGE_DISTANCE_M})")
    p_sim.add_argument("--sigma", type=float, default=energysim.SWEEP_SIGMA,
                       metavar="FRAC",
                       help="harvest noise fraction (default: "
                            f"{energysim.SWEEP_SIGMA})")
    p_sim.add_argument("--timeout", type=float,
                       default=energysim.DEFAULT_TIMEOUT_S, metavar="S",
                       help="wall-clock budget per trial (default: "
                            f"{energysim.DEFAULT_TIMEOUT_S})")
    p_sim.add_argument("--sweep", action="store_true",
                       help="sweep the distance grid instead of one point")
    p_sim.add_argument("--trace-out", metavar="PATH", default=None,
                       help="also write a fixed-step voltage trace to PATH")
    p_sim.add_argument("--duration", type=float, default=5.0, metavar="S",
                       help="trace length in seconds (default: 5.0)")
    p_sim.add_argument("--dt", type=float, default=1e-4, metavar="S",
                       help="trace integration step (default: 1e-4)")
    p_sim.add_argument("--hist-out", metavar="PATH", default=None,
                       help="also write the per-power-cycle histogram to PATH")
    p_sim.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        seed = _resolve_seed(getattr(args, "seed", None))
        return args.func(args, seed)
    except reports.EmptyReportError as exc:
        print(f"intermithash: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"intermithash: error: {exc}", file=sys.stderr)
        return 2
    except (quality.CapacityError, _RuntimeFailure, OSError) as exc:
        print(f"intermithash: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
