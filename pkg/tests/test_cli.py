"""Report rendering and the command-line surface.

Covers exact column headers, JSON round-trips, exit codes, the seed
precedence chain (flag over environment over zero), and byte-identical
reruns of seeded reports.
"""

import hashlib
import json
import shutil
import subprocess
import sys

import pytest

from intermithash import bench, cli, energysim, hashes, quality, reports

BENCH_HEADER_LINE = "hash,class,ns_per_byte,compressions,cipher_calls,state_bytes"


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------- reports


def test_bench_csv_header_exact():
    results = bench.bench_all(("md5",), ("short",), repetitions=1, warmup=0)
    text = reports.render_bench(results, "csv")
    assert text.splitlines()[0] == BENCH_HEADER_LINE


def test_bench_json_round_trip_identity():
    results = bench.bench_all(("md5", "mmo-speck128"), ("short", "long"),
                              repetitions=2, warmup=0)
    text = reports.render_bench(results, "json")
    doc = json.loads(text)
    assert doc["schema"] == 1
    assert reports.parse_bench_json(text) == results


def test_quality_csv_layout():
    rows = quality.run_battery(
        ("md5",), ("cyclic", "differential", "window"), scale="small")
    text = reports.render_quality(rows, "csv")
    lines = text.splitlines()
    assert lines[0] == ",".join(reports.QUALITY_HEADER)
    cells = dict(zip(reports.QUALITY_HEADER, lines[1].split(",")))
    assert cells["hash"] == "md5"
    assert cells["differential_distribution_pct"] == "N/A"
    assert cells["window_distribution_pct"] == "N/A"
    assert cells["cyclic_collisions"] == "0"
    assert float(cells["cyclic_distribution_pct"]) > 0
    # tests that were not run stay blank
    assert cells["avalanche_bias_pct"] == ""
    assert cells["zeros_collisions"] == ""


def test_quality_ndjson_one_doc_per_cell():
    rows = quality.run_battery(("md5", "dm-speck128"), ("cyclic", "zeros"),
                               scale="small")
    lines = reports.render_quality(rows, "json").splitlines()
    assert len(lines) == 4
    docs = [json.loads(line) for line in lines]
    assert {(d["hash"], d["test"]) for d in docs} == {
        ("md5", "cyclic"), ("md5", "zeros"),
        ("dm-speck128", "cyclic"), ("dm-speck128", "zeros")}
    assert all(d["schema"] == 1 for d in docs)
    assert all("sample_count" in d and "params" in d for d in docs)


def test_render_rejects_empty_and_unknown_format():
    for render in (reports.render_bench, reports.render_quality,
                   reports.render_sweep, reports.render_simulate):
        with pytest.raises(reports.EmptyReportError):
            render([], "csv")
    with pytest.raises(ValueError):
        reports.render_bench([object()], "xml")


def test_render_is_deterministic_text():
    rows = quality.run_battery(("md5",), ("cyclic",), scale="small", seed=3)
    again = quality.run_battery(("md5",), ("cyclic",), scale="small", seed=3)
    assert reports.render_quality(rows, "csv") == reports.render_quality(again, "csv")
    assert reports.render_quality(rows, "json") == reports.render_quality(again, "json")


# ------------------------------------------------------------ hash command


def test_hash_command_known_vectors(tmp_path, capsys):
    empty = tmp_path / "empty.bin"
    empty.write_bytes(b"")
    code, out, _ = run_cli(["hash", "md5", str(empty)], capsys)
    assert code == 0
    assert out == "d41d8cd98f00b204e9800998ecf8427e\n"

    abc = tmp_path / "abc.bin"
    abc.write_bytes(b"abc")
    code, out, _ = run_cli(["hash", "blake2s", str(abc)], capsys)
    assert code == 0
    assert out.strip() == hashlib.blake2s(b"abc").hexdigest()


def test_hash_command_zero_padding_alias(tmp_path, capsys):
    # 10 zero bytes pad to the same single fragment as the empty message.
    ten = tmp_path / "ten.bin"
    ten.write_bytes(bytes(10))
    code, out, _ = run_cli(["hash", "dm-speck128", str(ten)], capsys)
    assert code == 0
    assert out.strip() == hashes.hexdigest("dm-speck128", b"")
    assert out.strip() == hashes.hexdigest("dm-speck128", bytes(16))


def test_hash_command_errors(tmp_path, capsys):
    code, _, err = run_cli(["hash", "nosuch"], capsys)
    assert code == 2
    assert "unknown hash" in err
    code, _, err = run_cli(["hash", "md5", str(tmp_path / "missing")], capsys)
    assert code == 1


def test_hash_command_reads_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "intermithash.cli", "hash", "md5"],
        input=b"abc", capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout.decode().strip() == hashlib.md5(b"abc").hexdigest()


def test_console_script_installed():
    exe = shutil.which("intermithash")
    assert exe, "console script not on PATH"
    proc = subprocess.run([exe, "hash", "md5"], input=b"", capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout.decode().strip() == hashlib.md5(b"").hexdigest()


# ----------------------------------------------------------- bench command


def test_bench_command_csv(capsys):
    code, out, _ = run_cli(
        ["bench", "--hash", "md5", "--reps", "3", "--warmup", "1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == BENCH_HEADER_LINE
    assert len(lines) == 3  # short and long rows
    assert lines[1].startswith("md5,short,")
    assert lines[2].startswith("md5,long,")


def test_bench_command_json(capsys):
    code, out, _ = run_cli(
        ["bench", "--hash", "blake2s", "--class", "long", "--reps", "2",
         "--warmup", "0", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["results"][0]["hash"] == "blake2s"
    assert doc["results"][0]["compressions"] == 20


def test_bench_command_errors(capsys):
    assert run_cli(["bench", "--hash", "nosuch", "--reps", "1"], capsys)[0] == 2
    assert run_cli(["bench", "--reps", "0", "--hash", "md5"], capsys)[0] == 2


# --------------------------------------------------------- quality command


def test_quality_command_csv(capsys):
    code, out, _ = run_cli(
        ["quality", "--scale", "small", "--hash", "md5", "--hash",
         "dm-speck128", "--test", "cyclic", "--test", "zeros"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(reports.QUALITY_HEADER)
    md5_cells = dict(zip(reports.QUALITY_HEADER, lines[1].split(",")))
    dm_cells = dict(zip(reports.QUALITY_HEADER, lines[2].split(",")))
    assert md5_cells["zeros_collisions"] == "0"
    # 4096 zero-length prefixes alias down to 256 distinct padded inputs
    assert dm_cells["zeros_collisions"] == "3840"


def test_quality_command_errors(capsys):
    assert run_cli(["quality", "--hash", "nosuch", "--scale", "small"],
                   capsys)[0] == 2
    assert run_cli(["quality", "--test", "nosuch", "--scale", "small"],
                   capsys)[0] == 2


def test_quality_same_seed_byte_identical(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv(cli.ENV_SEED, raising=False)
    args = ["quality", "--scale", "small", "--hash", "dm-speck128",
            "--test", "cyclic", "--seed", "5"]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(f1)]) == 0
    assert cli.main(args + ["--out", str(f2)]) == 0
    assert f1.read_bytes() == f2.read_bytes()

    f3 = tmp_path / "c.csv"
    args_other = ["quality", "--scale", "small", "--hash", "dm-speck128",
                  "--test", "cyclic", "--seed", "6", "--out", str(f3)]
    assert cli.main(args_other) == 0
    assert f1.read_bytes() != f3.read_bytes()


def test_seed_precedence_flag_env_default(tmp_path, monkeypatch):
    base = ["quality", "--scale", "small", "--hash", "md5", "--test", "cyclic"]
    flagged = tmp_path / "flag.csv"
    monkeypatch.delenv(cli.ENV_SEED, raising=False)
    assert cli.main(base + ["--seed", "9", "--out", str(flagged)]) == 0

    from_env = tmp_path / "env.csv"
    monkeypatch.setenv(cli.ENV_SEED, "9")
    assert cli.main(base + ["--out", str(from_env)]) == 0
    assert from_env.read_bytes() == flagged.read_bytes()

    flag_wins = tmp_path / "wins.csv"
    monkeypatch.setenv(cli.ENV_SEED, "3")
    assert cli.main(base + ["--seed", "9", "--out", str(flag_wins)]) == 0
    assert flag_wins.read_bytes() == flagged.read_bytes()


def test_bad_env_seed_is_usage_error(capsys, monkeypatch):
    monkeypatch.setenv(cli.ENV_SEED, "not-a-number")
    code, _, err = run_cli(
        ["quality", "--scale", "small", "--hash", "md5", "--test", "cyclic"],
        capsys)
    assert code == 2
    assert cli.ENV_SEED in err


# -------------------------------------------------------- simulate command


def test_simulate_point_run(capsys):
    code, out, _ = run_cli(["simulate", "--trials", "40"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == ",".join(reports.SIMULATE_HEADER)
    assert lines[1].startswith("continuous,")
    assert lines[2].startswith("iem,")
    iem_rate = float(lines[2].split(",")[-1])
    cont_rate = float(lines[1].split(",")[-1])
    assert iem_rate >= cont_rate


def test_simulate_single_policy(capsys):
    code, out, _ = run_cli(
        ["simulate", "--trials", "20", "--policy", "iem"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("iem,")


def test_simulate_sweep(capsys):
    code, out, _ = run_cli(["simulate", "--sweep", "--trials", "20"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "distance_m,p_mean_w,continuous_rate,iem_rate"
    assert len(lines) == 1 + len(energysim.DEFAULT_SWEEP_DISTANCES)
    for line in lines[1:]:
        _, _, cont, iem = line.split(",")
        assert float(iem) >= float(cont)


def test_simulate_trace_and_histogram_files(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    hist = tmp_path / "hist.csv"
    code, out, _ = run_cli(
        ["simulate", "--trials", "120", "--duration", "0.5",
         "--trace-out", str(trace), "--hist-out", str(hist)], capsys)
    assert code == 0
    assert trace.read_text().splitlines()[0] == "t_s,v_cap,state,cycles_done"
    assert hist.read_text().splitlines()[0] == "bucket_low,bucket_high,count"


def test_simulate_params_file(tmp_path, capsys):
    good = tmp_path / "params.txt"
    energysim.save_params(energysim.default_params(), good)
    code, out, _ = run_cli(
        ["simulate", "--trials", "10", "--params", str(good)], capsys)
    assert code == 0

    assert run_cli(["simulate", "--params", str(tmp_path / "none.txt")],
                   capsys)[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("capacitance_f = not-a-float\n")
    code, _, err = run_cli(["simulate", "--params", str(bad)], capsys)
    assert code == 1
    assert "bad params file" in err


def test_simulate_usage_errors(capsys):
    assert run_cli(["simulate", "--distance", "0"], capsys)[0] == 2
    assert run_cli(
        ["simulate", "--trials", "99", "--hist-out", "/tmp/x.csv"],
        capsys)[0] == 2


# ------------------------------------------------------------------ figures


def test_plot_writes_png_next_to_report(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code, _, _ = run_cli(
        ["bench", "--hash", "md5", "--reps", "2", "--warmup", "0",
         "--out", str(out), "--plot"], capsys)
    assert code == 0
    png = tmp_path / "bench.png"
    assert png.exists() and png.stat().st_size > 0
    assert out.read_text().splitlines()[0] == BENCH_HEADER_LINE


def test_no_arguments_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
