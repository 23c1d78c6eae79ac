"""Acceptance criteria 1-11.

Each test records one PASS/FAIL line (printed in the pytest terminal
summary, or directly when this file is run as a script) and then asserts.
Runtime bounds are part of each criterion.
"""

import csv
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

import oracles
from lloydsbm.bench import BenchConfig, run_benchmark
from lloydsbm.core import relabel
from lloydsbm.estimators import BlockStats, expected_loss, node_means, block_means
from lloydsbm.ingest import EventLog, build_graph
from lloydsbm.likelihood import ScoreVariant, bernoulli_loglik, score_matrix
from lloydsbm.lloyd import lloyd_mle
from lloydsbm.metrics import delta_mismatch, gamma

RESULTS: list[str] = []


def report(num, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    line = f"criterion {num:>2} {'PASS' if ok else 'FAIL'}: {detail} [{elapsed:.1f}s < {limit:g}s]"
    RESULTS.append(line)
    print(line)
    assert ok, line


def bench(text, **kw):
    return run_benchmark(BenchConfig.from_text(text), **kw)


def asym_config(methods, reps, b, h=0.0, omega=0.2, n="50", seed=1):
    return f"""
[grid]
N = {n}
family = asym
a = 0.9
b = {b}
h = {h}
omega = {omega}
[run]
methods = {methods}
replications = {reps}
seed = {seed}
"""


def by(recs, **kw):
    return [r for r in recs if all(getattr(r, k) == v for k, v in kw.items())]


def test_c01_likelihood_rewrite_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        k = int(rng.integers(1, 4))
        X = (rng.random((n, n)) < rng.random()).astype(float)
        z = rng.integers(0, k, n)
        P = rng.uniform(0.01, 0.99, (k, k))
        ll = bernoulli_loglik(X, z, P)
        s = BlockStats(X, z, k)
        for v in ScoreVariant:
            S = score_matrix(s, P, v, clamp=False)
            worst = max(worst, abs(S[np.arange(n), z].sum() - ll))
    report(1, worst <= 1e-9, f"max |l - sum S| = {worst:.2e} over 1000 instances x 3 variants",
           time.perf_counter() - t0, 5)


def test_c02_block_mean_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(3, 13))
        k = int(rng.integers(1, min(n, 4) + 1))
        X = rng.random((n, n))
        z = np.concatenate([np.arange(k), rng.integers(0, k, n - k)])
        rng.shuffle(z)
        mu, nu = node_means(X, z, k)
        P = block_means(X, z, k)
        for p in range(k):
            via_mu = mu[z == p].mean(0)
            via_nu = nu[:, z == p].mean(1)
            worst = max(worst, np.max(np.abs(via_mu - P[p]) / np.abs(P[p])),
                        np.max(np.abs(via_nu - P[:, p]) / np.abs(P[:, p])))
    report(2, worst <= 1e-12, f"max relative gap = {worst:.2e} over 1000 instances",
           time.perf_counter() - t0, 5)


def test_c03_metric_axioms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(103)
    ok = True
    for _ in range(100):
        n, k = int(rng.integers(2, 40)), int(rng.integers(2, 6))
        z, z2 = rng.integers(0, k, n), rng.integers(0, k, n)
        tau = rng.permutation(k)
        ok &= gamma(z, relabel(z, tau), k) == 0
        ok &= gamma(z, z2, k) == gamma(z2, z, k)
        ok &= delta_mismatch(z, z, k) == 0
    hand = (gamma([0, 0, 1, 1], [0, 1, 0, 1], 2), delta_mismatch([0, 0, 1, 1], [0, 1, 0, 1], 2))
    ok &= hand == (0.5, 0.5)
    report(3, bool(ok), f"permutation zero, symmetry, self-zero on 100 draws; split example "
           f"Gamma={hand[0]}, Delta={hand[1]}", time.perf_counter() - t0, 1)


def test_c04_nash_property():
    t0 = time.perf_counter()
    rng = np.random.default_rng(104)
    converged = failures = 0
    for _ in range(200):
        n = int(rng.integers(2, 9))
        k = int(rng.integers(1, min(n, 3) + 1))
        X = (rng.random((n, n)) < rng.random()).astype(float)
        r = lloyd_mle(X, rng.integers(0, k, n), k)
        if r.converged:
            converged += 1
            failures += bool(oracles.nash_violations(X.tolist(), r.labels, k))
    report(4, failures == 0 and converged > 0,
           f"{converged} converged runs of 200, {failures} with a profitable single-node move",
           time.perf_counter() - t0, 30)


def test_c05_lloyd_l1_accuracy():
    t0 = time.perf_counter()
    easy = bench(asym_config("lloyd-l1", 200, 0.4, omega=0.2, seed=51))
    hard = bench(asym_config("lloyd-l1", 200, 0.8, omega=1.0, seed=52))
    g1 = np.mean([r.gamma for r in easy])
    g2 = np.mean([r.gamma for r in hard])
    report(5, g1 <= 0.01 and 0.20 <= g2 <= 0.40,
           f"mean Gamma (b=0.4, w=0.2) = {g1:.4f} <= 0.01; (b=0.8, w=1.0) = {g2:.3f} in [0.20, 0.40]",
           time.perf_counter() - t0, 120)


def test_c06_spectral_vs_refined():
    t0 = time.perf_counter()
    recs = bench(asym_config("spectral, spectral+lloyd-l1", 200, 0.4, seed=61))
    g_sp = np.mean([r.gamma for r in by(recs, method="spectral")])
    g_l1 = np.mean([r.gamma for r in by(recs, method="spectral+lloyd-l1")])
    report(6, 0.05 <= g_sp <= 0.30 and g_l1 <= 0.02 and g_l1 < g_sp,
           f"spectral mean Gamma = {g_sp:.4f} (band [0.05, 0.30]); "
           f"spectral+lloyd-l1 = {g_l1:.4f} (<= 0.02, and strictly below spectral)",
           time.perf_counter() - t0, 180)


def test_c07_accuracy_and_speed_ordering():
    t0 = time.perf_counter()
    methods = "spectral+lloyd-l1, spectral+lloyd-mle, spectral+gd, spectral+vem"
    acc = bench(asym_config(methods, 100, 0.4, seed=71), timing_serial=True)
    timing = bench(asym_config("spectral+lloyd-l1, spectral+gd, spectral+vem", 100, 0.8, seed=72),
                   timing_serial=True)
    gammas = {m.strip(): np.mean([r.gamma for r in by(acc, method=m.strip())])
              for m in methods.split(",")}
    times = {m: np.mean([r.wall_time_s for r in by(timing, method=f"spectral+{m}")])
             for m in ("lloyd-l1", "gd", "vem")}
    ok = all(g <= 0.05 for g in gammas.values())
    ok &= times["gd"] >= 10 * times["lloyd-l1"] and times["vem"] >= 10 * times["lloyd-l1"]
    g_txt = ", ".join(f"{m.split('+')[1]}={g:.4f}" for m, g in gammas.items())
    t_txt = ", ".join(f"{m}={t * 1e3:.2f}ms" for m, t in times.items())
    report(7, bool(ok), f"b=0.4 mean Gamma {g_txt} (<= 0.05); b=0.8 mean time {t_txt} "
           f"(gd/l1 = {times['gd'] / times['lloyd-l1']:.1f}x, vem/l1 = "
           f"{times['vem'] / times['lloyd-l1']:.1f}x, need >= 10x)", time.perf_counter() - t0, 300)


def test_c08_consistency_trend():
    t0 = time.perf_counter()
    med = {}
    for n in (50, 100, 200):
        recs = bench(asym_config("spectral+lloyd-l1", 100, 0.4, n=str(n), seed=80 + n))
        med[n] = float(np.median([r.delta for r in recs]))
    mono = med[50] >= med[100] >= med[200]
    shrink = med[200] <= 0.5 * med[50] or (med[50] <= 0.01 and med[200] <= 0.01)
    report(8, mono and shrink, "median Delta " + ", ".join(f"N={n}: {v:.4f}" for n, v in med.items()),
           time.perf_counter() - t0, 300)


def test_c09_expected_loss_closed_form():
    t0 = time.perf_counter()
    a, b = 0.9, 0.3
    P = np.array([[a, b], [b, a]])
    printed = scaled = lib = 0.0
    count = 0
    for n in range(2, 9):
        for z_star in ([0] * (n // 2) + [1] * (n - n // 2), [0] * (n - 1) + [1], [i % 2 for i in range(n)]):
            z_star = np.array(z_star)
            for z in oracles.all_labelings(n, 2):
                brute = oracles.expected_loss_display(z, z_star, P.tolist(), 2)
                closed = oracles.k2_closed_form(z, z_star, a, b)
                printed = max(printed, abs(closed - brute))
                scaled = max(scaled, abs(closed / n - brute))
                lib = max(lib, abs(expected_loss(z, z_star, P) - brute))
                count += 1
    # the brute force is the reference; the unscaled closed form is off by a factor N
    ok = lib <= 1e-10 and scaled <= 1e-10
    report(9, ok, f"{count} labelings: |library - brute| <= {lib:.1e}; unscaled closed form off by "
           f"up to {printed:.3f}, closed form / N off by {scaled:.1e}", time.perf_counter() - t0, 30)


def test_c10_ingest_scaling_law():
    t0 = time.perf_counter()
    rng = np.random.default_rng(110)
    events = [(f"id{rng.integers(12)}", float(t)) for t in rng.uniform(0, 60, 80)]
    log_ = EventLog.from_events(events)
    doubled = EventLog(log_.ids, [np.sort(np.concatenate([t, t])) for t in log_.times])
    X, X2 = build_graph(log_), build_graph(doubled)
    ok = X.max() <= 0.5 and np.array_equal(X2, 2 * X)
    report(10, bool(ok), f"doubling events: X scaled by exactly 2 on a {X.shape[0]}-node log "
           f"(max X = {X.max():.3f})", time.perf_counter() - t0, 1)


def _masked_csv(path):
    rows = list(csv.reader(open(path)))
    keep = [i for i, c in enumerate(rows[0]) if "wall_time" not in c]
    return [[r[i] for i in keep] for r in rows]


def test_c11_bench_determinism(tmp_path):
    t0 = time.perf_counter()
    config = Path(__file__).parent / "data" / "mini.ini"
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        subprocess.run([sys.executable, "-m", "lloydsbm.cli", "bench", "--config", str(config),
                        "--out", str(out)], check=True, capture_output=True)
        outs.append(out)
    same = all(_masked_csv(outs[0] / f) == _masked_csv(outs[1] / f)
               for f in ("runs.csv", "summary.csv"))
    nrows = len(_masked_csv(outs[0] / "runs.csv")) - 1
    report(11, same, f"two bench executions, {nrows} runs: CSVs identical with wall-time masked",
           time.perf_counter() - t0, 60)


if __name__ == "__main__":
    import tempfile

    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                pass
