"""Monte-Carlo benchmark over planted-partition instances.

A config is an INI file with two sections::

    [grid]                      # every key is a comma-separated value list
    N = 50
    family = asym               # sym | asym
    a = 0.9
    b = 0.4, 0.8
    h = 0
    omega = 0.2, 1.0

    [run]
    methods = lloyd-l1, spectral, spectral+lloyd-l1
    replications = 200
    seed = 20240601
    max_iters = 100             # optional, default 100
    max_wall_time = 10          # optional, seconds, default 10
    lambda_reg = 1.0            # optional, spectral regularisation

The grid is the Cartesian product of the ``[grid]`` lists.  For each grid
point and replication one instance ``(z_star, X, z0)`` is drawn and every
method runs on it, so methods are compared on the same graphs.  Methods:

* ``lloyd-l1``, ``lloyd-l2``, ``lloyd-huber:<r>``: profile-distance Lloyd;
* ``lloyd-mle`` or ``lloyd-mle:<forward|backward|averaged>``: likelihood Lloyd;
* ``gd``, ``vem``: single-node likelihood ascent and variational EM;
* ``spectral``: regularised spectral clustering;
* ``spectral+<method>``: ``<method>`` started from the spectral labels.

Plain methods start from the noisy labels ``z0``.  The spectral labeling is
computed once per instance; a composite's wall time covers the refinement
only, and the ``spectral`` rows carry the spectral time.
"""

from __future__ import annotations

import configparser
import csv
import itertools
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .baselines import SpectralConfig, gradient_descent, spectral, vem
from .distances import L1, DistanceKind
from .estimators import block_means, delta_gap, loss
from .likelihood import ScoreVariant
from .lloyd import IterationBudget, lloyd_mle, lloyd_sbm
from .metrics import delta_mismatch, gamma, gamma_raw
from .simulate import K_PROTOCOL, ExperimentPoint, replication_seed, sample_instance

RUN_COLUMNS = ["family", "N", "a", "b", "h", "omega", "method", "rep", "seed", "gamma",
               "gamma_raw", "delta", "loss", "delta_hat", "labels_used", "iters", "converged",
               "wall_time_s"]

SUMMARY_COLUMNS = ["family", "N", "a", "b", "h", "omega", "method", "n_runs", "mean_gamma",
                   "se_gamma", "mean_gamma_raw", "mean_delta", "mean_loss", "mean_delta_hat",
                   "mean_labels_used", "mean_iters", "convergence_rate", "mean_wall_time_s",
                   "se_wall_time_s"]


class BenchError(RuntimeError):
    pass


# --- methods -----------------------------------------------------------------

@dataclass(frozen=True)
class Method:
    name: str  # as written in the config
    base: str  # the method without any "spectral+" prefix
    from_spectral: bool

    @classmethod
    def parse(cls, text: str) -> "Method":
        name = text.strip()
        base, plus = name, False
        if name.startswith("spectral+"):
            base, plus = name[len("spectral+"):], True
        make_runner(base)  # validates
        if plus and base == "spectral":
            raise ValueError("spectral+spectral is not a method")
        return cls(name, base, plus)


def make_runner(base: str, k: int = K_PROTOCOL):
    """``f(X, z0, budget) -> (labels, iterations, converged)`` for a base method name."""
    if base.startswith("lloyd-mle"):
        _, _, v = base.partition(":")
        variant = ScoreVariant(v) if v else ScoreVariant.AVERAGED

        def run(X, z0, budget):
            r = lloyd_mle(X, z0, k, variant, budget)
            return r.labels, r.iterations, r.converged
        return run
    if base.startswith("lloyd-"):
        d = DistanceKind.parse(base[len("lloyd-"):])

        def run(X, z0, budget):
            r = lloyd_sbm(X, z0, k, d, budget)
            return r.labels, r.iterations, r.converged
        return run
    if base == "gd":
        def run(X, z0, budget):
            r = gradient_descent(X, z0, k, budget)
            return r.labels, r.iterations, r.converged
        return run
    if base == "vem":
        def run(X, z0, budget):
            r = vem(X, z0, k, budget)
            return r.labels, r.iterations, r.converged
        return run
    if base == "spectral":
        return None
    raise ValueError(f"unknown method {base!r}")


# --- config --------------------------------------------------------------------

@dataclass(frozen=True)
class BenchConfig:
    points: tuple
    methods: tuple
    replications: int = 200
    seed: int = 0
    budget: IterationBudget = IterationBudget()
    spectral: SpectralConfig = SpectralConfig()

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        if not self.points:
            raise ValueError("the grid is empty")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ValueError("duplicate method names")

    @classmethod
    def from_text(cls, text: str) -> "BenchConfig":
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        cp.optionxform = str  # keep "N" as written
        cp.read_string(text)
        for sec in ("grid", "run"):
            if not cp.has_section(sec):
                raise ValueError(f"config lacks a [{sec}] section")
        g = cp["grid"]
        axes = {"N": int, "family": str, "a": float, "b": float, "h": float, "omega": float}
        unknown = set(g) - set(axes)
        if unknown:
            raise ValueError(f"unknown grid axes: {sorted(unknown)}")
        values = {}
        for key, conv in axes.items():
            if key not in g:
                raise ValueError(f"grid axis {key!r} is missing")
            values[key] = [conv(v.strip()) for v in g[key].split(",") if v.strip()]
            if not values[key]:
                raise ValueError(f"grid axis {key!r} is empty")
        points = tuple(ExperimentPoint(n, fam, a, b, h, om) for n, fam, a, b, h, om in
                       itertools.product(*(values[k] for k in axes)))
        r = cp["run"]
        allowed = {"methods", "replications", "seed", "max_iters", "max_wall_time", "lambda_reg"}
        unknown = set(r) - allowed
        if unknown:
            raise ValueError(f"unknown run keys: {sorted(unknown)}")
        if "methods" not in r:
            raise ValueError("run.methods is missing")
        methods = tuple(Method.parse(m) for m in r["methods"].split(",") if m.strip())
        return cls(points, methods,
                   replications=r.getint("replications", 200),
                   seed=r.getint("seed", 0),
                   budget=IterationBudget(r.getint("max_iters", 100), r.getfloat("max_wall_time", 10.0)),
                   spectral=SpectralConfig(lambda_reg=r.getfloat("lambda_reg", 1.0)))

    @classmethod
    def read(cls, path) -> "BenchConfig":
        return cls.from_text(Path(path).read_text())


# --- runs ------------------------------------------------------------------------

@dataclass
class RunRecord:
    family: str
    N: int
    a: float
    b: float
    h: float
    omega: float
    method: str
    rep: int
    seed: int
    gamma: float
    gamma_raw: float
    delta: float  # pairs co-clustered in z_star but split by the estimate
    loss: float  # mean l1 profile distance of the estimate
    delta_hat: float
    labels_used: int
    iters: int
    converged: bool
    wall_time_s: float


def _record(point, name, rep, seed, X, z_star, z, iters, conv, wall):
    k = K_PROTOCOL
    return RunRecord(point.family, point.n, point.a, point.b, point.h, point.omega, name, rep,
                     seed, gamma(z_star, z, k), gamma_raw(z_star, z, k),
                     delta_mismatch(z_star, z, k), loss(X, z, k, L1),
                     delta_gap(block_means(X, z, k)), int(np.unique(z).size), int(iters),
                     bool(conv), wall)


def run_cell(cfg: BenchConfig, point_idx: int, rep: int) -> list[RunRecord]:
    """All methods on one replication of one grid point."""
    point = cfg.points[point_idx]
    seed = replication_seed(cfg.seed, point_idx, rep)
    ss = np.random.SeedSequence(seed)
    s_inst, s_spec = ss.spawn(2)
    z_star, X, z0 = sample_instance(point, s_inst)
    spec_labels = None
    out = []
    for m in cfg.methods:
        if m.base == "spectral" or m.from_spectral:
            if spec_labels is None:
                t0 = time.perf_counter()
                spec_labels = spectral(X, K_PROTOCOL, cfg.spectral, s_spec)
                spec_time = time.perf_counter() - t0
        if m.base == "spectral":
            out.append(_record(point, m.name, rep, seed, X, z_star, spec_labels, 0, True, spec_time))
            continue
        start = spec_labels if m.from_spectral else z0
        run = make_runner(m.base)
        t0 = time.perf_counter()
        z, iters, conv = run(X, start, cfg.budget)
        wall = time.perf_counter() - t0
        out.append(_record(point, m.name, rep, seed, X, z_star, z, iters, conv, wall))
    return out


def _cell_task(args):
    cfg, p, r = args
    try:
        return run_cell(cfg, p, r)
    except Exception as exc:  # report which cell failed
        raise BenchError(f"cell point={cfg.points[p]} rep={r} failed: {exc!r}") from exc


def run_benchmark(cfg: BenchConfig, workers: int = 1, timing_serial: bool = False,
                  progress=None) -> list[RunRecord]:
    """Records ordered by (grid point, method, replication), independent of ``workers``."""
    tasks = [(cfg, p, r) for p in range(len(cfg.points)) for r in range(cfg.replications)]
    if timing_serial or workers <= 1:
        results = []
        for i, t in enumerate(tasks):
            results.append(_cell_task(t))
            if progress:
                progress(i + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_cell_task, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    order = {m.name: i for i, m in enumerate(cfg.methods)}
    keyed = [((p, order[rec.method], r), rec) for (_, p, r), cell in zip(tasks, results) for rec in cell]
    keyed.sort(key=lambda t: t[0])
    return [rec for _, rec in keyed]


# --- aggregation -------------------------------------------------------------------

def _key(r: RunRecord):
    return (r.family, r.N, r.a, r.b, r.h, r.omega, r.method)


def _se(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else 0.0


def aggregate(records: list[RunRecord]) -> list[dict]:
    """One row per (grid point, method), in first-appearance order."""
    groups: dict = defaultdict(list)
    for r in records:
        groups[_key(r)].append(r)
    rows = []
    for key, rs in groups.items():
        col = lambda name: np.array([getattr(r, name) for r in rs], dtype=float)
        g, t = col("gamma"), col("wall_time_s")
        rows.append(dict(zip(SUMMARY_COLUMNS[:7], key)) | {
            "n_runs": len(rs),
            "mean_gamma": float(g.mean()), "se_gamma": _se(g),
            "mean_gamma_raw": float(col("gamma_raw").mean()),
            "mean_delta": float(col("delta").mean()),
            "mean_loss": float(col("loss").mean()),
            "mean_delta_hat": float(col("delta_hat").mean()),
            "mean_labels_used": float(col("labels_used").mean()),
            "mean_iters": float(col("iters").mean()),
            "convergence_rate": float(col("converged").mean()),
            "mean_wall_time_s": float(t.mean()), "se_wall_time_s": _se(t),
        })
    return rows


# --- output --------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_records(path, records: list[RunRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_COLUMNS)
        for r in records:
            d = asdict(r)
            w.writerow([_fmt(d[c]) for c in RUN_COLUMNS])


def read_records(path) -> list[RunRecord]:
    types = {f.name: f.type for f in fields(RunRecord)}
    conv = {"int": int, "float": float, "str": str, "bool": lambda s: s == "1"}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RUN_COLUMNS:
            raise ValueError(f"{path}: unexpected header")
        return [RunRecord(**{c: conv[types[c]](row[c]) for c in RUN_COLUMNS}) for row in reader]


def write_summary(path, summary: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in summary:
            w.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])


def _marginal(summary, axis, value):
    """Per method: axis values and the mean of ``value`` over all other axes."""
    acc: dict = defaultdict(lambda: defaultdict(list))
    for row in summary:
        acc[row["method"]][row[axis]].append(row[value])
    return {m: (sorted(by), [float(np.mean(by[x])) for x in sorted(by)]) for m, by in acc.items()}


CHARTS = [
    ("gamma_vs_b.svg", "b", "mean_gamma", r"$\Gamma$", False),
    ("gamma_vs_h.svg", "h", "mean_gamma", r"$\Gamma$", False),
    ("gamma_vs_omega.svg", "omega", "mean_gamma", r"$\Gamma$", False),
    ("time_vs_N.svg", "N", "mean_wall_time_s", "wall time (s)", True),
    ("labels_vs_b.svg", "b", "mean_labels_used", "labels used", False),
]


def emit(records: list[RunRecord], summary: list[dict], out_dir) -> list[Path]:
    """Write ``runs.csv``, ``summary.csv`` and, when there is data, the SVG charts."""
    from .plotting import plot_series

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "runs.csv", out / "summary.csv"]
    write_records(written[0], records)
    write_summary(written[1], summary)
    if not summary:
        return written
    for fname, axis, value, ylabel, logy in CHARTS:
        series = _marginal(summary, axis, value)
        xlabel = r"$\omega$" if axis == "omega" else axis
        plot_series(out / fname, series, xlabel, ylabel, f"{ylabel} vs {xlabel}", logy=logy)
        written.append(out / fname)
    return written
