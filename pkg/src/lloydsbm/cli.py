"""Command-line entry point: ``lloydsbm {fit,bench,ingest,simulate,compare}``."""

from __future__ import annotations

import argparse
import logging
import re
import sys
import time
from pathlib import Path

import numpy as np

from .baselines import SpectralConfig, spectral
from .bench import BenchConfig, BenchError, Method, aggregate, emit, make_runner, run_benchmark
from .core import read_graph, read_labels, write_graph, write_labels
from .distances import DistanceKind
from .estimators import block_means, delta_gap, loss
from .ingest import EventLog, build_graph, k_sweep, write_sweep
from .lloyd import IterationBudget
from .metrics import delta_mismatch, gamma, gamma_raw
from .simulate import ExperimentPoint, rng_from, sample_instance

_UNITS = {"ms": 1e-3, "s": 1.0, "m": 60.0, "min": 60.0, "h": 3600.0}


def parse_duration(text: str) -> float:
    """Seconds from ``"10s"``, ``"5m"``, ``"250ms"``, ``"1.5h"`` or a bare number."""
    m = re.fullmatch(r"\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(ms|s|min|m|h)?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}")
    value = float(m.group(1)) * _UNITS[m.group(2) or "s"]
    if value <= 0:
        raise argparse.ArgumentTypeError("duration must be positive")
    return value


def parse_k_range(text: str) -> list[int]:
    """``"2..6"`` (inclusive), ``"2,3,5"`` or ``"4"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}") from None
    if not ks:
        raise argparse.ArgumentTypeError(f"empty k range {text!r}")
    return ks


def _distance(text: str) -> DistanceKind:
    try:
        return DistanceKind.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lloydsbm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    f = sub.add_parser("fit", help="cluster one graph file")
    f.add_argument("--graph", required=True, help="dense graph file (first line N)")
    f.add_argument("--method", default="lloyd-l1",
                   help="lloyd-l1 | lloyd-l2 | lloyd-huber:<r> | lloyd-mle[:variant] | gd | vem | spectral")
    f.add_argument("--k", type=int, required=True)
    f.add_argument("--init", default="spectral", help="labels file, 'spectral' or 'random'")
    f.add_argument("--max-iters", type=int, default=100)
    f.add_argument("--time-limit", type=parse_duration, default=10.0)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--lambda-reg", type=float, default=1.0)
    f.add_argument("--out", help="directory for labels.txt and p_hat.csv")

    b = sub.add_parser("bench", help="run a simulation benchmark")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--timing-serial", action="store_true", help="run every cell in this process")

    i = sub.add_parser("ingest", help="event log -> graph -> multistart fits per K")
    i.add_argument("--events", required=True, help="CSV with header id,timestamp_min")
    i.add_argument("--window", type=float, default=1.0, help="minutes")
    i.add_argument("--k", type=parse_k_range, default=parse_k_range("2..6"))
    i.add_argument("--distance", type=_distance, default=DistanceKind.parse("l1"))
    i.add_argument("--budget", type=parse_duration, default=300.0, help="time budget per K")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="sample a planted instance")
    s.add_argument("--n", type=int, default=50)
    s.add_argument("--family", choices=["sym", "asym"], default="asym")
    s.add_argument("--a", type=float, default=0.9)
    s.add_argument("--b", type=float, default=0.4)
    s.add_argument("--h", type=float, default=0.0)
    s.add_argument("--omega", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)

    c = sub.add_parser("compare", help="score an estimate against reference labels")
    c.add_argument("--truth", required=True)
    c.add_argument("--labels", required=True)
    c.add_argument("--k", type=int, help="number of classes (default: largest label)")
    c.add_argument("--gamma-raw", action="store_true", help="also print the uncorrected score")
    return p


def _cmd_fit(args) -> int:
    X = read_graph(args.graph)
    n, k = X.shape[0], args.k
    if not 1 <= k <= n:
        raise ValueError(f"--k must lie in 1..{n}")
    method = Method.parse(args.method)
    if method.from_spectral:
        raise ValueError("use --init spectral instead of a spectral+ method")
    cfg = SpectralConfig(lambda_reg=args.lambda_reg)
    rng = rng_from(args.seed)
    if args.init == "spectral":
        z0 = spectral(X, k, cfg, rng)
    elif args.init == "random":
        z0 = rng.integers(0, k, n)
    else:
        z0 = read_labels(args.init, k)
    budget = IterationBudget(args.max_iters, args.time_limit)
    t0 = time.perf_counter()
    if method.base == "spectral":
        z, iters, conv = z0, 0, True
    else:
        z, iters, conv = make_runner(method.base, k)(X, z0, budget)
    wall = time.perf_counter() - t0
    P = block_means(X, z, k)
    print(f"method={method.name} k={k} iters={iters} converged={int(conv)} "
          f"loss_l1={loss(X, z, k):.6g} delta_hat={delta_gap(P) if k > 1 else 0.0:.6g} "
          f"labels_used={np.unique(z).size} wall_time_s={wall:.4g}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_labels(out / "labels.txt", z)
        np.savetxt(out / "p_hat.csv", P, delimiter=",", fmt="%.10g")
    else:
        print(" ".join(str(v + 1) for v in z))
    return 0


def _cmd_bench(args) -> int:
    cfg = BenchConfig.read(args.config)
    try:
        recs = run_benchmark(cfg, workers=args.workers, timing_serial=args.timing_serial)
    except BenchError as e:
        print(f"bench failed: {e}", file=sys.stderr)
        return 1
    for path in emit(recs, aggregate(recs), args.out):
        print(path)
    return 0


def _cmd_ingest(args) -> int:
    log_ = EventLog.read_csv(args.events)
    X = build_graph(log_, args.window)
    rows = k_sweep(X, args.k, args.distance, args.budget, args.seed)
    write_sweep(rows, log_, args.out)
    for r in rows:
        print(f"K={r.k} loss={r.loss:.6g} delta_hat={r.delta_hat:.6g} fits={r.n_fits}")
    return 0


def _cmd_simulate(args) -> int:
    point = ExperimentPoint(args.n, args.family, args.a, args.b, args.h, args.omega)
    z_star, X, z0 = sample_instance(point, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_graph(out / "graph.txt", X)
    write_labels(out / "truth.txt", z_star)
    write_labels(out / "init.txt", z0)
    print(out)
    return 0


def _cmd_compare(args) -> int:
    z_true = read_labels(args.truth)
    z = read_labels(args.labels)
    k = args.k or int(max(z_true.max(), z.max())) + 1
    print(f"gamma={gamma(z_true, z, k):.6g} delta={delta_mismatch(z_true, z, k):.6g}")
    if args.gamma_raw:
        print(f"gamma_raw={gamma_raw(z_true, z, k):.6g}")
    return 0


COMMANDS = {"fit": _cmd_fit, "bench": _cmd_bench, "ingest": _cmd_ingest,
            "simulate": _cmd_simulate, "compare": _cmd_compare}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
