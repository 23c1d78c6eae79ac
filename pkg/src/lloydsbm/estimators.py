"""Empirical block statistics, the profile loss and identifiability gaps.

All statistics follow the zero convention for empty classes: a mean over an
empty class is 0 rather than an error, so drained labelings mid-iteration
stay evaluable.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import check_graph, check_labels, class_sizes, one_hot
from .distances import L1, DistanceKind, pairwise


class NodeMeans(NamedTuple):
    mu: np.ndarray  # (N, K): mean weight from node i to class q
    nu: np.ndarray  # (K, N): mean weight from class p to node j


class Profile(NamedTuple):
    pi: np.ndarray  # (N, 2K) node profiles
    capital_pi: np.ndarray  # (K, 2K) class profiles


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(num, den).shape)
    np.divide(num, den, out=out, where=den != 0)
    return out


class BlockStats:
    """Sufficient statistics of ``(X, z)`` computed once and reused.

    ``row_sums[i, q]`` is the total weight from ``i`` into class ``q`` and
    ``col_sums[p, j]`` the total weight from class ``p`` into ``j``.
    """

    __slots__ = ("k", "sizes", "row_sums", "col_sums", "block_sums")

    def __init__(self, X: np.ndarray, z: np.ndarray, k: int):
        Z = one_hot(z, k)
        self.k = k
        self.sizes = class_sizes(z, k).astype(float)
        self.row_sums = X @ Z
        self.col_sums = Z.T @ X
        self.block_sums = Z.T @ self.row_sums

    @property
    def mu(self) -> np.ndarray:
        return _safe_div(self.row_sums, self.sizes[None, :])

    @property
    def nu(self) -> np.ndarray:
        return _safe_div(self.col_sums, self.sizes[:, None])

    @property
    def p_hat(self) -> np.ndarray:
        return _safe_div(self.block_sums, np.outer(self.sizes, self.sizes))

    def profiles(self) -> Profile:
        P = self.p_hat
        return Profile(np.hstack([self.mu, self.nu.T]), np.hstack([P, P.T]))


def _prepare(X, z, k):
    X = check_graph(X)
    z = check_labels(z, k, X.shape[0])
    return X, z


def node_means(X, z, k: int) -> NodeMeans:
    X, z = _prepare(X, z, k)
    s = BlockStats(X, z, k)
    return NodeMeans(s.mu, s.nu)


def block_means(X, z, k: int) -> np.ndarray:
    """``P_hat(z)``: mean weight from class ``p`` to class ``q`` (0 if either is empty)."""
    X, z = _prepare(X, z, k)
    return BlockStats(X, z, k).p_hat


def profiles(X, z, k: int) -> Profile:
    X, z = _prepare(X, z, k)
    return BlockStats(X, z, k).profiles()


def loss(X, z, k: int, d: DistanceKind = L1) -> float:
    """Mean distance between each node profile and the profile of its class."""
    X, z = _prepare(X, z, k)
    pi, Pi = BlockStats(X, z, k).profiles()
    D = pairwise(pi, Pi, d)
    return float(D[np.arange(z.size), z].mean())


def delta_gap(P) -> float:
    """Smallest, over class pairs, of the largest combined row+column gap.

    Applied to the true matrix this is the identifiability margin; applied to
    a fitted ``P_hat`` it is the class-number diagnostic used by the sweep.
    """
    P = np.asarray(P, dtype=float)
    k = P.shape[0]
    if P.ndim != 2 or P.shape[1] != k:
        raise ValueError("P must be square")
    if k < 2:
        raise ValueError("delta_gap needs at least two classes")
    rows = np.abs(P[:, None, :] - P[None, :, :])  # |P[p1,q] - P[p2,q]|
    cols = np.abs(P.T[:, None, :] - P.T[None, :, :])  # |P[q,p1] - P[q,p2]|
    gap = (rows + cols).max(axis=2)
    iu = np.triu_indices(k, 1)
    return float(gap[iu].min())


# --- expectations under a planted model ---------------------------------

def expected_node_means(z, z_star, P_star) -> NodeMeans:
    """Expectations of ``mu_hat``/``nu_hat`` under ``X_ij ~ P*[z*_i, z*_j]``."""
    P_star = np.asarray(P_star, dtype=float)
    k = P_star.shape[0]
    z = check_labels(z, k)
    z_star = check_labels(z_star, k, z.size)
    EX = P_star[np.ix_(z_star, z_star)]
    s = BlockStats(EX, z, k)
    return NodeMeans(s.mu, s.nu)


def expected_block_means(z, z_star, P_star) -> np.ndarray:
    P_star = np.asarray(P_star, dtype=float)
    k = P_star.shape[0]
    z = check_labels(z, k)
    z_star = check_labels(z_star, k, z.size)
    return BlockStats(P_star[np.ix_(z_star, z_star)], z, k).p_hat


def expected_loss(z, z_star, P_star, d: DistanceKind = L1) -> float:
    """Population version of the l1 profile loss for a candidate labeling."""
    if d != L1:
        raise ValueError(f"expected_loss supports only the l1 distance, got {d}")
    P_star = np.asarray(P_star, dtype=float)
    k = P_star.shape[0]
    z = check_labels(z, k)
    z_star = check_labels(z_star, k, z.size)
    EX = P_star[np.ix_(z_star, z_star)]
    pi, Pi = BlockStats(EX, z, k).profiles()
    return float(np.abs(pi - Pi[z]).sum(axis=1).mean())
