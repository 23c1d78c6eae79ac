"""Lloyd-type label updates for the SBM.

Two algorithms share one driver:

* ``lloyd_mle`` reassigns every node to the class maximising its likelihood
  score against the plug-in block matrix ``P_hat``;
* ``lloyd_sbm`` reassigns every node to the class whose profile is closest
  to the node's own profile under a distance ``d``.

Sweeps are synchronous: all nodes move at once from statistics computed at
the start of the sweep.  A run stops when the labeling repeats up to a
relabeling of the classes, when it revisits one of the last few partitions
(a cycle), or when the iteration or wall-time budget runs out.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import canonical, check_graph, check_labels
from .distances import L1, DistanceKind, pairwise
from .estimators import BlockStats
from .likelihood import ScoreVariant, block_loglik, safe_logs, score_matrix

CYCLE_MEMORY = 4


@dataclass(frozen=True)
class IterationBudget:
    max_iters: int = 100
    max_wall_time: float = 10.0  # seconds

    def __post_init__(self):
        if self.max_iters < 1 or not self.max_wall_time > 0:
            raise ValueError("budget limits must be positive")


@dataclass
class FitResult:
    labels: np.ndarray
    p_hat: np.ndarray
    loss: float
    iterations: int
    converged: bool
    cycle_detected: bool = False


def labels_equal_up_to_relabeling(z, z2) -> bool:
    z = np.asarray(z)
    z2 = np.asarray(z2)
    if z.shape != z2.shape:
        raise ValueError("label vectors have different lengths")
    return bool(np.array_equal(canonical(z), canonical(z2)))


def best_class(scores: np.ndarray, z: np.ndarray, maximize: bool) -> np.ndarray:
    """Row-wise arg-best; a node keeps its label when it ties for best.

    Otherwise the smallest class index among the best wins.
    """
    s = scores if maximize else -scores
    best = s.max(axis=1)
    new = np.argmax(s == best[:, None], axis=1)
    keep = s[np.arange(z.size), z] == best
    return np.where(keep, z, new)


def _check_inputs(X, z0, k):
    X = check_graph(X)
    n = X.shape[0]
    if k > n:
        raise ValueError(f"k={k} exceeds the number of nodes {n}")
    return X, check_labels(z0, k, n)


def iterate(z0: np.ndarray, sweep: Callable[[np.ndarray], tuple[np.ndarray, float]],
            budget: IterationBudget, maximize: bool):
    """Drive synchronous sweeps until a stopping rule fires.

    ``sweep(z)`` returns the next labeling and the objective value of ``z``
    (a by-product of the statistics it computes).  Returns
    ``(labels, iterations, converged, cycle_detected)``.
    """
    start = time.perf_counter()
    z = z0
    recent = deque(maxlen=CYCLE_MEMORY)
    best_z, best_obj = z0, None
    better = (lambda a, b: a > b) if maximize else (lambda a, b: a < b)
    it = 0
    while it < budget.max_iters:
        if time.perf_counter() - start > budget.max_wall_time:
            break
        z_new, obj = sweep(z)
        it += 1
        if best_obj is None or better(obj, best_obj):
            best_z, best_obj = z, obj
        key_new = canonical(z_new).tobytes()
        if key_new == canonical(z).tobytes():
            return z_new, it, True, False
        if key_new in recent:
            return best_z, it, False, True
        recent.append(canonical(z).tobytes())
        z = z_new
    return z, it, False, False


def payoff_matrix(stats: BlockStats, P, x_diag: np.ndarray, z: np.ndarray,
                  variant: ScoreVariant = ScoreVariant.AVERAGED) -> np.ndarray:
    """Scores with the self-loop term of node ``i`` evaluated at ``P[p, p]``.

    ``score_matrix`` charges node ``i``'s own loop at ``P[p, z_i]`` (out) and
    ``P[z_i, p]`` (in), as if ``i`` stayed in its class.  Here each direction
    instead carries half of ``f(X_ii, P[p, p])``, so forward + backward is
    exactly the change in log-likelihood when ``i`` alone moves to ``p``.
    """
    S = score_matrix(stats, P, variant)
    logP, log1mP = safe_logs(P)
    x = x_diag[:, None]
    f = lambda lp, l1: x * lp + (1.0 - x) * l1
    stay_out = f(logP[:, z].T, log1mP[:, z].T)  # [i, p] -> P[p, z_i]
    stay_in = f(logP[z, :], log1mP[z, :])  # [i, p] -> P[z_i, p]
    own = f(np.diag(logP)[None, :], np.diag(log1mP)[None, :])
    if variant is ScoreVariant.FORWARD:
        return S - stay_out + 0.5 * own
    if variant is ScoreVariant.BACKWARD:
        return S - stay_in + 0.5 * own
    return S + 0.5 * (own - stay_out - stay_in)


def lloyd_mle(X, z0, k: int, variant: ScoreVariant = ScoreVariant.AVERAGED,
              budget: IterationBudget = IterationBudget(),
              exact_self_loop: bool = True) -> FitResult:
    """Likelihood-score Lloyd iteration; ``loss`` is the plug-in log-likelihood.

    With ``exact_self_loop`` (default) nodes maximise ``payoff_matrix``, which
    makes a converged labeling a true single-node equilibrium of the
    likelihood at fixed ``P_hat``.  ``exact_self_loop=False`` uses the plain
    scores, whose argmax can disagree with the best single-node move because
    of the ``i == j`` term.
    """
    X, z0 = _check_inputs(X, z0, k)
    x_diag = np.diag(X).copy()

    def sweep(z):
        s = BlockStats(X, z, k)
        P = s.p_hat
        if exact_self_loop:
            S = payoff_matrix(s, P, x_diag, z, variant)
        else:
            S = score_matrix(s, P, variant)
        return best_class(S, z, maximize=True), block_loglik(s.block_sums, s.sizes, P)

    z, it, conv, cyc = iterate(z0, sweep, budget, maximize=True)
    s = BlockStats(X, z, k)
    P = s.p_hat
    return FitResult(z, P, block_loglik(s.block_sums, s.sizes, P), it, conv, cyc)


def lloyd_sbm(X, z0, k: int, d: DistanceKind = L1,
              budget: IterationBudget = IterationBudget()) -> FitResult:
    """Profile-distance Lloyd iteration; ``loss`` is the mean profile distance."""
    X, z0 = _check_inputs(X, z0, k)
    rows = np.arange(X.shape[0])

    def sweep(z):
        pi, Pi = BlockStats(X, z, k).profiles()
        D = pairwise(pi, Pi, d)
        return best_class(D, z, maximize=False), float(D[rows, z].mean())

    z, it, conv, cyc = iterate(z0, sweep, budget, maximize=False)
    s = BlockStats(X, z, k)
    pi, Pi = s.profiles()
    L = float(pairwise(pi, Pi, d)[rows, z].mean())
    return FitResult(z, s.p_hat, L, it, conv, cyc)
