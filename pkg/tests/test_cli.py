import argparse
import csv
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lloydsbm import bench
from lloydsbm.cli import main, parse_duration, parse_k_range
from lloydsbm.core import read_graph, read_labels

DATA = Path(__file__).parent / "data"


def test_parse_duration():
    assert parse_duration("10s") == 10
    assert parse_duration("5m") == 300
    assert parse_duration("250ms") == 0.25
    assert parse_duration("1.5h") == 5400
    assert parse_duration("300") == 300
    for bad in ("", "ten", "-1s", "0"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_duration(bad)


def test_parse_k_range():
    assert parse_k_range("2..6") == [2, 3, 4, 5, 6]
    assert parse_k_range("2,4") == [2, 4]
    assert parse_k_range("3") == [3]
    with pytest.raises(argparse.ArgumentTypeError):
        parse_k_range("a..b")


def test_simulate_fit_compare(tmp_path, capsys):
    sim = tmp_path / "sim"
    assert main(["simulate", "--n", "30", "--seed", "4", "--out", str(sim)]) == 0
    assert read_graph(sim / "graph.txt").shape == (30, 30)
    assert main(["fit", "--graph", str(sim / "graph.txt"), "--k", "3", "--init",
                 str(sim / "init.txt"), "--out", str(tmp_path / "fit")]) == 0
    z = read_labels(tmp_path / "fit" / "labels.txt", 3)
    assert z.size == 30
    assert np.loadtxt(tmp_path / "fit" / "p_hat.csv", delimiter=",").shape == (3, 3)
    capsys.readouterr()
    assert main(["compare", "--truth", str(sim / "truth.txt"), "--labels",
                 str(tmp_path / "fit" / "labels.txt"), "--gamma-raw"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("gamma=") and "gamma_raw=" in out


@pytest.mark.parametrize("method", ["lloyd-l2", "lloyd-huber:0.1", "lloyd-mle:backward", "gd",
                                    "vem", "spectral"])
def test_fit_methods(tmp_path, capsys, method):
    sim = tmp_path / "sim"
    main(["simulate", "--n", "20", "--seed", "1", "--out", str(sim)])
    assert main(["fit", "--graph", str(sim / "graph.txt"), "--k", "3", "--method", method,
                 "--init", "random", "--time-limit", "2s"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[-2].startswith(f"method={method}")
    assert len(lines[-1].split()) == 20


def test_fit_errors(tmp_path, capsys):
    main(["simulate", "--n", "10", "--out", str(tmp_path)])
    g = str(tmp_path / "graph.txt")
    assert main(["fit", "--graph", g, "--k", "3", "--method", "bogus"]) == 2
    assert main(["fit", "--graph", g, "--k", "11"]) == 2
    assert main(["fit", "--graph", str(tmp_path / "missing.txt"), "--k", "2"]) == 2
    assert "error:" in capsys.readouterr().err


def test_bench_command(tmp_path):
    assert main(["bench", "--config", str(DATA / "mini.ini"), "--out", str(tmp_path),
                 "--timing-serial"]) == 0
    assert (tmp_path / "runs.csv").exists() and (tmp_path / "gamma_vs_b.svg").exists()
    rows = list(csv.DictReader(open(tmp_path / "summary.csv")))
    assert len(rows) == 4 * 6


def test_bench_failure_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(bench, "run_cell", lambda *a: 1 / 0)
    assert main(["bench", "--config", str(DATA / "mini.ini"), "--out", str(tmp_path)]) == 1
    assert "bench failed" in capsys.readouterr().err


def test_ingest_command(tmp_path):
    rng = np.random.default_rng(0)
    ev = tmp_path / "ev.csv"
    with open(ev, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["id", "timestamp_min"])
        for g in range(2):
            for t in rng.uniform(0, 500, 20) + 1000 * g:
                for m in range(5):
                    w.writerow([f"{g}-{m}", t + rng.uniform(0, 0.2)])
    out = tmp_path / "out"
    assert main(["ingest", "--events", str(ev), "--k", "2..3", "--budget", "200ms",
                 "--out", str(out)]) == 0
    assert (out / "delta_sweep.svg").exists() and (out / "p_hat_K3.csv").exists()


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "lloydsbm.cli", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "bench" in r.stdout
