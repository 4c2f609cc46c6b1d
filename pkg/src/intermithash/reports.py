"""Rendering of results to delimited text and JSON.

Every emitter here is deterministic byte-for-byte: CSV uses "\n" line
endings and shortest round-trip float formatting, JSON uses fixed key
order.  Rendering the same results twice yields identical bytes, so
same-seed runs can be compared with a plain file diff.

Formats:
  bench      CSV table or a single JSON document ({"schema": 1, ...})
             that parses back to the exact input results.
  quality    CSV summary in the battery's table layout (one row per
             hash, collision/distribution columns per test), or
             newline-delimited JSON with one document per (hash, test).
  trace      CSV of fixed-step simulator samples.
  histogram  CSV of per-power-cycle available-cycle buckets.
  sweep      CSV of success rates per distance for both policies.
  simulate   CSV of per-policy success summaries.
"""

from __future__ import annotations

import csv
import io
import json

from .bench import BenchResult
from .quality import TEST_NAMES, BatteryRow

__all__ = [
    "SCHEMA_VERSION",
    "EmptyReportError",
    "BENCH_HEADER",
    "QUALITY_HEADER",
    "TRACE_HEADER",
    "HISTOGRAM_HEADER",
    "SWEEP_HEADER",
    "SIMULATE_HEADER",
    "render_bench",
    "parse_bench_json",
    "render_quality",
    "render_trace",
    "render_histogram",
    "render_sweep",
    "render_simulate",
    "emit",
]

SCHEMA_VERSION = 1

BENCH_HEADER = ("hash", "class", "ns_per_byte", "compressions",
                "cipher_calls", "state_bytes")

# One row per hash; Avalanche first, then collision/distribution pairs
# in battery order.  Tests without a defined distribution carry N/A.
QUALITY_HEADER = ("hash", "avalanche_bias_pct") + tuple(
    f"{test}_{col}"
    for test in TEST_NAMES if test != "avalanche"
    for col in ("collisions", "distribution_pct")
)

TRACE_HEADER = ("t_s", "v_cap", "state", "cycles_done")
HISTOGRAM_HEADER = ("bucket_low", "bucket_high", "count")
SWEEP_HEADER = ("distance_m", "p_mean_w", "continuous_rate", "iem_rate")
SIMULATE_HEADER = ("policy", "distance_m", "p_mean_w", "task_cycles",
                   "trials", "successes", "success_rate")

_NO_DISTRIBUTION = frozenset({"differential", "window"})


class EmptyReportError(ValueError):
    """Asked to render zero results; the caller's selection is empty."""


def _cell(value) -> str:
    """Stable text for one CSV cell; floats keep full precision."""
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _check_format(fmt: str) -> None:
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}; choose csv or json")


def _require(results, what: str):
    if not results:
        raise EmptyReportError(f"no {what} results to report")
    return results


# ------------------------------------------------------------------ bench


def render_bench(results, fmt: str = "csv") -> str:
    _check_format(fmt)
    _require(results, "benchmark")
    if fmt == "csv":
        rows = [(r.hash_name, r.msg_class, r.ns_per_byte, r.compressions,
                 r.cipher_calls, r.state_bytes) for r in results]
        return _csv_text(BENCH_HEADER, rows)
    doc = {
        "schema": SCHEMA_VERSION,
        "results": [
            {
                "hash": r.hash_name,
                "class": r.msg_class,
                "ns_per_byte": r.ns_per_byte,
                "compressions": r.compressions,
                "cipher_calls": r.cipher_calls,
                "state_bytes": r.state_bytes,
            }
            for r in results
        ],
    }
    return _json_text(doc)


def parse_bench_json(text: str):
    """Inverse of render_bench(..., "json")."""
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    return [
        BenchResult(
            hash_name=entry["hash"],
            msg_class=entry["class"],
            ns_per_byte=entry["ns_per_byte"],
            compressions=entry["compressions"],
            cipher_calls=entry["cipher_calls"],
            state_bytes=entry["state_bytes"],
        )
        for entry in doc["results"]
    ]


# ---------------------------------------------------------------- quality


def _quality_csv(rows) -> str:
    by_hash: dict = {}
    order = []
    for row in rows:
        if row.hash_name not in by_hash:
            by_hash[row.hash_name] = {}
            order.append(row.hash_name)
        by_hash[row.hash_name][row.test] = row

    table = []
    for name in order:
        cells = [name]
        ava = by_hash[name].get("avalanche")
        cells.append(None if ava is None else ava.avalanche_bias_pct)
        for test in TEST_NAMES:
            if test == "avalanche":
                continue
            row = by_hash[name].get(test)
            if row is None:
                cells.extend([None, None])
            elif test in _NO_DISTRIBUTION:
                cells.extend([row.collisions, "N/A"])
            else:
                cells.extend([row.collisions, row.distribution_bias_pct])
        table.append(cells)
    return _csv_text(QUALITY_HEADER, table)


def render_quality(rows, fmt: str = "csv") -> str:
    _check_format(fmt)
    _require(rows, "quality")
    if fmt == "csv":
        return _quality_csv(rows)
    lines = []
    for row in rows:
        doc = {
            "schema": SCHEMA_VERSION,
            "hash": row.hash_name,
            "test": row.test,
            "sample_count": row.sample_count,
            "collisions": row.collisions,
            "distribution_bias_pct": row.distribution_bias_pct,
            "avalanche_bias_pct": row.avalanche_bias_pct,
            "params": row.params,
        }
        lines.append(json.dumps(doc))
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- simulator


def render_trace(trace, fmt: str = "csv") -> str:
    _check_format(fmt)
    _require(trace.samples, "trace")
    if fmt == "csv":
        return _csv_text(TRACE_HEADER, trace.samples)
    doc = {
        "schema": SCHEMA_VERSION,
        "p_harvest_w": trace.p_harvest_w,
        "samples": [
            {"t_s": t, "v_cap": v, "state": s, "cycles_done": c}
            for t, v, s, c in trace.samples
        ],
        "ipcs": [
            {"start_s": a, "end_s": b, "cycles": c}
            for a, b, c in trace.ipcs
        ],
    }
    return _json_text(doc)


def render_histogram(hist, fmt: str = "csv") -> str:
    _check_format(fmt)
    rows = _require(hist.rows(), "histogram")
    if fmt == "csv":
        return _csv_text(HISTOGRAM_HEADER, rows)
    doc = {
        "schema": SCHEMA_VERSION,
        "mean_cycles": hist.mean_cycles,
        "buckets": [
            {"bucket_low": lo, "bucket_high": hi, "count": n}
            for lo, hi, n in rows
        ],
    }
    return _json_text(doc)


def render_sweep(points, fmt: str = "csv") -> str:
    _check_format(fmt)
    _require(points, "sweep")
    if fmt == "csv":
        rows = [(p.distance_m, p.p_mean_w, p.continuous_rate, p.iem_rate)
                for p in points]
        return _csv_text(SWEEP_HEADER, rows)
    doc = {
        "schema": SCHEMA_VERSION,
        "results": [
            {
                "distance_m": p.distance_m,
                "p_mean_w": p.p_mean_w,
                "continuous_rate": p.continuous_rate,
                "iem_rate": p.iem_rate,
            }
            for p in points
        ],
    }
    return _json_text(doc)


def render_simulate(summaries, fmt: str = "csv") -> str:
    """summaries: dicts with the SIMULATE_HEADER keys."""
    _check_format(fmt)
    _require(summaries, "simulation")
    if fmt == "csv":
        rows = [tuple(s[k] for k in SIMULATE_HEADER) for s in summaries]
        return _csv_text(SIMULATE_HEADER, rows)
    doc = {
        "schema": SCHEMA_VERSION,
        "results": [{k: s[k] for k in SIMULATE_HEADER} for s in summaries],
    }
    return _json_text(doc)


# ------------------------------------------------------------------- emit


def emit(text: str, out_path=None) -> None:
    """Write rendered text to a file, or to stdout when no path is given."""
    if out_path is None:
        import sys

        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
