"""Bernoulli SBM log-likelihood and its per-node score decompositions."""

from __future__ import annotations

import enum

import numpy as np

from .core import check_graph, check_labels
from .estimators import BlockStats

EPS = 1e-10


class ScoreVariant(enum.Enum):
    FORWARD = "forward"  # out-edges only
    BACKWARD = "backward"  # in-edges only
    AVERAGED = "averaged"


def _xlogy(x, y):
    # x * log(y) with 0 * log(0) = 0; a positive x against y = 0 gives -inf
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    out = np.zeros(x.shape)
    nz = x != 0
    with np.errstate(divide="ignore"):
        out[nz] = x[nz] * np.log(y[nz])
    return out


def safe_logs(P) -> tuple[np.ndarray, np.ndarray]:
    """``log P`` and ``log(1 - P)`` with the arguments floored at ``EPS``."""
    P = np.asarray(P, dtype=float)
    return np.log(np.maximum(P, EPS)), np.log(np.maximum(1.0 - P, EPS))


def bernoulli_loglik(X, z, P) -> float:
    """Exact log-likelihood of ``X`` given labels and block probabilities.

    Uses ``0 * log 0 = 0``; returns ``-inf`` when an observed weight has
    probability zero.  No clamping is applied here.
    """
    X = check_graph(X)
    P = np.asarray(P, dtype=float)
    z = check_labels(z, P.shape[0], X.shape[0])
    Pz = P[np.ix_(z, z)]
    return float(_xlogy(X, Pz).sum() + _xlogy(1.0 - X, 1.0 - Pz).sum())


def block_loglik(block_sums, sizes, P) -> float:
    """Log-likelihood from block totals; valid because it is linear in ``X``.

    Block ``(p, q)`` contributes ``E log P + (n_p n_q - E) log(1 - P)``.
    """
    pairs = np.outer(sizes, sizes)
    return float(_xlogy(block_sums, P).sum() + _xlogy(pairs - block_sums, 1.0 - P).sum())


def score_matrix(stats: BlockStats, P, variant: ScoreVariant = ScoreVariant.AVERAGED,
                 clamp: bool = True) -> np.ndarray:
    """All scores ``S[i, p]`` for one labeling, as an ``(N, K)`` array.

    With ``clamp`` the logs use floored probabilities so a node facing an
    impossible block still gets a finite (very negative) score.
    """
    if clamp:
        logP, log1mP = safe_logs(P)
        fwd = lambda: stats.row_sums @ logP.T + (stats.sizes - stats.row_sums) @ log1mP.T
        bwd = lambda: stats.col_sums.T @ logP + (stats.sizes[:, None] - stats.col_sums).T @ log1mP
    else:
        P = np.asarray(P, dtype=float)

        def fwd():
            a = stats.row_sums[:, None, :]  # i, (p), q
            b = stats.sizes[None, None, :] - a
            return _xlogy(a, P[None]).sum(-1) + _xlogy(b, 1 - P[None]).sum(-1)

        def bwd():
            a = stats.col_sums.T[:, None, :]  # i, (p), q  (weights from q into i)
            b = stats.sizes[None, None, :] - a
            PT = P.T[None]
            return _xlogy(a, PT).sum(-1) + _xlogy(b, 1 - PT).sum(-1)

    if variant is ScoreVariant.FORWARD:
        return fwd()
    if variant is ScoreVariant.BACKWARD:
        return bwd()
    return 0.5 * (fwd() + bwd())


def score(X, z, P, i: int, p: int, variant: ScoreVariant = ScoreVariant.AVERAGED) -> float:
    """Score of placing node ``i`` in class ``p`` given the statistics of ``z``."""
    X = check_graph(X)
    P = np.asarray(P, dtype=float)
    k = P.shape[0]
    z = check_labels(z, k, X.shape[0])
    S = score_matrix(BlockStats(X, z, k), P, variant, clamp=False)
    return float(S[i, p])


def profile_loglik(X, z, k: int) -> float:
    """Log-likelihood at the plug-in estimate ``P_hat(z)``.

    ``P_hat`` is 0 (or 1) on a block only when every weight there is 0 (or 1),
    so the ``0 log 0`` convention already keeps this finite.
    """
    X = check_graph(X)
    z = check_labels(z, k, X.shape[0])
    s = BlockStats(X, z, k)
    return block_loglik(s.block_sums, s.sizes, s.p_hat)
