"""Event-log pipeline: passage times -> co-occurrence graph -> multistart fits.

An event log is a CSV with header ``id,timestamp_min``.  Individuals are
indexed in order of first appearance.  Two individuals are linked by the
number of pairs of their passages that fall within ``window`` minutes of
each other, normalised by the square root of their passage counts.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import SpectralConfig, spectral
from .core import check_graph
from .distances import L1, DistanceKind
from .estimators import delta_gap
from .lloyd import FitResult, IterationBudget, lloyd_sbm
from .simulate import rng_from

log = logging.getLogger(__name__)


@dataclass
class EventLog:
    ids: list  # individual ids, index i <-> ids[i]
    times: list  # times[i]: sorted float array of passage times (minutes)

    @property
    def n(self) -> int:
        return len(self.ids)

    @classmethod
    def from_events(cls, events) -> "EventLog":
        """Build from ``(id, timestamp)`` pairs."""
        order: dict = {}
        buckets: list[list[float]] = []
        for ident, t in events:
            t = float(t)
            if not np.isfinite(t):
                raise ValueError(f"non-finite timestamp for {ident!r}")
            if ident not in order:
                order[ident] = len(buckets)
                buckets.append([])
            buckets[order[ident]].append(t)
        if not buckets:
            raise ValueError("event log is empty")
        return cls(list(order), [np.sort(np.array(b)) for b in buckets])

    @classmethod
    def read_csv(cls, path) -> "EventLog":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"id", "timestamp_min"} <= set(reader.fieldnames):
                raise ValueError(f"{path}: expected header 'id,timestamp_min'")
            return cls.from_events((row["id"], row["timestamp_min"]) for row in reader)


def cooccurrence_counts(log_: EventLog, window: float = 1.0) -> np.ndarray:
    """``C[i, j]`` = number of passage pairs of ``i`` and ``j`` at most ``window`` apart."""
    if not window > 0:
        raise ValueError("window must be positive")
    n = log_.n
    C = np.zeros((n, n))
    for i in range(n):
        ti = log_.times[i]
        for j in range(i + 1, n):
            tj = log_.times[j]
            hi = np.searchsorted(tj, ti + window, side="right")
            lo = np.searchsorted(tj, ti - window, side="left")
            C[i, j] = C[j, i] = float((hi - lo).sum())
    return C


def build_graph(log_: EventLog, window: float = 1.0) -> np.ndarray:
    """Degree-normalised co-occurrence graph with a zero diagonal.

    ``A = C / 2`` and ``X_ij = A_ij / sqrt(n_i n_j)``; entries above 1 are
    clipped with a warning.
    """
    counts = np.array([t.size for t in log_.times], dtype=float)
    if counts.size == 0:
        raise ValueError("event log is empty")
    if counts.min() < 1:
        raise ValueError("every individual needs at least one event")
    A = 0.5 * cooccurrence_counts(log_, window)
    X = A / np.sqrt(np.outer(counts, counts))
    if X.max() > 1.0:
        log.warning("clipping %d graph weights above 1 (max %.3g)", int((X > 1).sum()), X.max())
        X = np.minimum(X, 1.0)
    return X


@dataclass
class MultistartResult:
    best: FitResult
    n_fits: int
    spectral_only: bool  # budget ran out before any random restart
    losses: list = field(default_factory=list)


def multistart_fit(X, k: int, d: DistanceKind = L1, time_budget: float = 300.0, seed=None,
                   budget: IterationBudget = IterationBudget(),
                   spectral_cfg: SpectralConfig = SpectralConfig(),
                   max_fits: int | None = None) -> MultistartResult:
    """Spectral-initialised fit, then uniform random restarts until the budget ends.

    Keeps the fit with the smallest profile loss.  ``max_fits`` caps the
    total number of fits (useful for deterministic tests).
    """
    X = check_graph(X)
    if not time_budget > 0:
        raise ValueError("time budget must be positive")
    rng = rng_from(seed)
    deadline = time.perf_counter() + time_budget
    best = lloyd_sbm(X, spectral(X, k, spectral_cfg, rng), k, d, budget)
    losses = [best.loss]
    while time.perf_counter() < deadline and (max_fits is None or len(losses) < max_fits):
        fit = lloyd_sbm(X, rng.integers(0, k, X.shape[0]), k, d, budget)
        losses.append(fit.loss)
        if fit.loss < best.loss:
            best = fit
    return MultistartResult(best, len(losses), len(losses) == 1, losses)


@dataclass
class SweepRow:
    k: int
    labels: np.ndarray
    p_hat: np.ndarray
    loss: float
    delta_hat: float
    n_fits: int


def k_sweep(X, k_range, d: DistanceKind = L1, per_k_budget: float = 300.0, seed=None,
            max_fits: int | None = None) -> list[SweepRow]:
    """Multistart fit for each ``K`` and the identifiability gap of its ``P_hat``."""
    X = check_graph(X)
    ks = list(k_range)
    if not ks or min(ks) < 2 or max(ks) > X.shape[0]:
        raise ValueError(f"k range must lie within 2..{X.shape[0]}")
    ss = np.random.SeedSequence(seed)
    rows = []
    for k, child in zip(ks, ss.spawn(len(ks))):
        res = multistart_fit(X, k, d, per_k_budget, child, max_fits=max_fits)
        fit = res.best
        rows.append(SweepRow(k, fit.labels, fit.p_hat, fit.loss, delta_gap(fit.p_hat), res.n_fits))
    return rows


def write_sweep(rows: list[SweepRow], log_: EventLog | None, out_dir) -> None:
    """Labels, ``P_hat`` per K, the gap-vs-K table and its figure."""
    from .plotting import plot_series

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ids = log_.ids if log_ is not None else [str(i + 1) for i in range(len(rows[0].labels))]
    with open(out / "id_map.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node", "id"])
        w.writerows((i + 1, ident) for i, ident in enumerate(ids))
    with open(out / "labels.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id"] + [f"K{r.k}" for r in rows])
        for i, ident in enumerate(ids):
            w.writerow([ident] + [int(r.labels[i]) + 1 for r in rows])
    for r in rows:
        np.savetxt(out / f"p_hat_K{r.k}.csv", r.p_hat, delimiter=",", fmt="%.10g")
    with open(out / "delta_sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["K", "delta_hat", "loss", "n_fits", "labels_used"])
        for r in rows:
            w.writerow([r.k, repr(r.delta_hat), repr(r.loss), r.n_fits, np.unique(r.labels).size])
    plot_series(out / "delta_sweep.svg", {"delta_hat": ([r.k for r in rows], [r.delta_hat for r in rows])},
                xlabel="K", ylabel=r"$\hat\delta$", title="Identifiability gap vs number of classes")
