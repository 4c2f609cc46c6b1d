"""Figure rendering for report data.

Optional companions to the delimited reports: each function takes the
same objects the text emitters take and writes one PNG.  The Agg backend
is forced so rendering works headless; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .quality import TEST_NAMES  # noqa: E402

__all__ = ["plot_bench", "plot_quality", "plot_trace", "plot_histogram",
           "plot_sweep", "plot_simulate"]

_DPI = 120


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def plot_bench(results, path) -> None:
    """Grouped bars of ns/byte, one group per hash, one bar per class."""
    classes = sorted({r.msg_class for r in results})
    names = list(dict.fromkeys(r.hash_name for r in results))
    by_cell = {(r.hash_name, r.msg_class): r.ns_per_byte for r in results}
    x = np.arange(len(names))
    width = 0.8 / max(len(classes), 1)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, cls in enumerate(classes):
        heights = [by_cell.get((n, cls), 0.0) for n in names]
        ax.bar(x + i * width, heights, width, label=cls)
    ax.set_xticks(x + width * (len(classes) - 1) / 2)
    ax.set_xticklabels(names, rotation=20, ha="right")
    ax.set_ylabel("ns per byte (median)")
    ax.set_yscale("log")
    ax.legend(title="message class")
    _save(fig, path)


def plot_quality(rows, path) -> None:
    """Collisions (log scale) and bias percentages across the battery."""
    names = list(dict.fromkeys(r.hash_name for r in rows))
    coll_tests = [t for t in TEST_NAMES if t != "avalanche"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))

    x = np.arange(len(coll_tests))
    width = 0.8 / max(len(names), 1)
    for i, name in enumerate(names):
        by_test = {r.test: r for r in rows if r.hash_name == name}
        heights = [
            (by_test[t].collisions or 0) + 1 if t in by_test else 0
            for t in coll_tests
        ]
        ax1.bar(x + i * width, heights, width, label=name)
    ax1.set_xticks(x + width * (len(names) - 1) / 2)
    ax1.set_xticklabels(coll_tests, rotation=45, ha="right")
    ax1.set_ylabel("collisions + 1")
    ax1.set_yscale("log")
    ax1.legend(fontsize="small")

    bias_labels = []
    bias_series = {name: [] for name in names}
    for t in TEST_NAMES:
        present = False
        for name in names:
            for r in rows:
                if r.hash_name == name and r.test == t:
                    bias = (r.avalanche_bias_pct if t == "avalanche"
                            else r.distribution_bias_pct)
                    if bias is not None:
                        present = True
        if not present:
            continue
        bias_labels.append(t)
        for name in names:
            val = 0.0
            for r in rows:
                if r.hash_name == name and r.test == t:
                    v = (r.avalanche_bias_pct if t == "avalanche"
                         else r.distribution_bias_pct)
                    val = 0.0 if v is None else v
            bias_series[name].append(val)
    x2 = np.arange(len(bias_labels))
    for i, name in enumerate(names):
        ax2.bar(x2 + i * width, bias_series[name], width, label=name)
    ax2.set_xticks(x2 + width * (len(names) - 1) / 2)
    ax2.set_xticklabels(bias_labels, rotation=45, ha="right")
    ax2.set_ylabel("worst bit bias (%)")
    _save(fig, path)


def plot_trace(trace, path) -> None:
    """Capacitor voltage over time with executed cycles on a twin axis."""
    t = [s[0] for s in trace.samples]
    v = [s[1] for s in trace.samples]
    cycles = [s[3] for s in trace.samples]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(t, v, lw=0.8, label="v_cap")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("capacitor voltage (V)")
    ax2 = ax.twinx()
    ax2.plot(t, cycles, lw=0.8, color="tab:orange", label="cycles done")
    ax2.set_ylabel("cycles done")
    ax.set_title(f"harvest {trace.p_harvest_w * 1e3:.3f} mW")
    _save(fig, path)


def plot_histogram(hist, path) -> None:
    """Available cycles per power cycle across noisy trials."""
    lows = hist.bucket_lows
    widths = hist.bucket_highs - hist.bucket_lows
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(lows, hist.counts, width=widths, align="edge", edgecolor="black",
           linewidth=0.3)
    ax.axvline(hist.mean_cycles, color="tab:red", ls="--",
               label=f"mean {hist.mean_cycles:,.0f}")
    ax.set_xlabel("cycles per power cycle")
    ax.set_ylabel("trials")
    ax.legend()
    _save(fig, path)


def plot_simulate(summaries, path) -> None:
    """Success rate per policy at one operating point."""
    labels = [s["policy"] for s in summaries]
    rates = [s["success_rate"] for s in summaries]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(labels, rates)
    ax.set_ylabel("task success rate")
    ax.set_ylim(0.0, 1.05)
    s0 = summaries[0]
    ax.set_title(f"{s0['distance_m']} m, {s0['p_mean_w'] * 1e3:.3f} mW, "
                 f"{s0['trials']} trials")
    _save(fig, path)


def plot_sweep(points, path) -> None:
    """Success rate vs distance for both checkpointing policies."""
    d = [p.distance_m for p in points]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(d, [p.iem_rate for p in points], "o-", label="iem")
    ax.plot(d, [p.continuous_rate for p in points], "s-", label="continuous")
    ax.set_xlabel("distance (m)")
    ax.set_ylabel("task success rate")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    _save(fig, path)
