"""Comparison methods: regularised spectral clustering, greedy likelihood
ascent over single-node moves ("gradient descent"), and Bernoulli
variational EM."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import check_graph, check_labels, class_sizes, one_hot
from .estimators import BlockStats
from .likelihood import EPS, _xlogy, block_loglik
from .lloyd import FitResult, IterationBudget, _check_inputs, best_class, iterate
from .simulate import rng_from


# --- k-means ------------------------------------------------------------------

@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    history: list = field(default_factory=list)  # inertia after each iteration


def _plusplus(points, k, rng):
    n = points.shape[0]
    centers = [points[rng.integers(n)]]
    d2 = ((points - centers[0]) ** 2).sum(1)
    for _ in range(1, k):
        total = d2.sum()
        idx = rng.choice(n, p=d2 / total) if total > 0 else rng.integers(n)
        centers.append(points[idx])
        d2 = np.minimum(d2, ((points - points[idx]) ** 2).sum(1))
    return np.array(centers)


def _lloyd_kmeans(points, centers, max_iters):
    history = []
    labels = None
    for _ in range(max_iters):
        d2 = ((points[:, None, :] - centers[None]) ** 2).sum(-1)
        new = d2.argmin(1)
        history.append(float(d2[np.arange(len(points)), new].sum()))
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(len(centers)):
            members = points[labels == c]
            if len(members):  # an emptied cluster keeps its old center
                centers[c] = members.mean(0)
    d2 = ((points[:, None, :] - centers[None]) ** 2).sum(-1)
    labels = d2.argmin(1)
    inertia = float(d2[np.arange(len(points)), labels].sum())
    history.append(inertia)
    return KMeansResult(labels, centers, inertia, history)


def kmeans_fit(points, k: int, seed=None, restarts: int = 10, max_iters: int = 100) -> KMeansResult:
    """Squared-error k-means, best of ``restarts`` k-means++ initialisations."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if len(points) < k:
        raise ValueError(f"need at least {k} points, got {len(points)}")
    rng = rng_from(seed)
    best = None
    for _ in range(max(1, restarts)):
        res = _lloyd_kmeans(points, _plusplus(points, k, rng), max_iters)
        if best is None or res.inertia < best.inertia:
            best = res
    return best


def kmeans(points, k: int, seed=None, restarts: int = 10, max_iters: int = 100) -> np.ndarray:
    return kmeans_fit(points, k, seed, restarts, max_iters).labels


# --- spectral -----------------------------------------------------------------

@dataclass(frozen=True)
class SpectralConfig:
    lambda_reg: float = 1.0
    kmeans_restarts: int = 10
    kmeans_max_iters: int = 100

    def __post_init__(self):
        if not 0.0 <= self.lambda_reg <= 1.0:
            raise ValueError("lambda_reg must lie in [0, 1]")


def normalized_gram(X, lambda_reg: float = 1.0) -> np.ndarray:
    """``D^-1/2 Y D^-1/2`` with ``Y = X'^T X'`` and ``X'`` the regularised graph.

    Nodes whose row of ``Y`` sums to zero get a zero row and column.
    """
    X = check_graph(X)
    Xr = X + lambda_reg * X.mean()
    Y = Xr.T @ Xr
    deg = Y.sum(1)
    inv = np.zeros_like(deg)
    np.divide(1.0, np.sqrt(deg), out=inv, where=deg > 0)
    L = inv[:, None] * Y * inv[None, :]
    return 0.5 * (L + L.T)


def spectral_embedding(X, k: int, lambda_reg: float = 1.0):
    """Top-``k`` eigenpairs of the normalised Gram matrix, largest first.

    Each eigenvector is signed so its first entry above 1e-12 in magnitude
    is positive.
    """
    L = normalized_gram(X, lambda_reg)
    vals, vecs = np.linalg.eigh(L)
    order = np.argsort(vals, kind="stable")[::-1][:k]
    vals, U = vals[order], vecs[:, order]
    for c in range(U.shape[1]):
        nz = np.flatnonzero(np.abs(U[:, c]) > 1e-12)
        if nz.size and U[nz[0], c] < 0:
            U[:, c] = -U[:, c]
    return vals, U


def spectral(X, k: int, cfg: SpectralConfig = SpectralConfig(), seed=None) -> np.ndarray:
    X = check_graph(X)
    if k > X.shape[0]:
        raise ValueError(f"k={k} exceeds the number of nodes")
    if k == 1:
        return np.zeros(X.shape[0], dtype=np.int64)
    _, U = spectral_embedding(X, k, cfg.lambda_reg)
    return kmeans(U, k, seed, cfg.kmeans_restarts, cfg.kmeans_max_iters)


# --- single-node likelihood ascent ---------------------------------------------

def _profile_ll_batch(E, sizes):
    """Plug-in log-likelihood for a stack of block-sum matrices ``E[..., K, K]``."""
    pairs = sizes[..., :, None] * sizes[..., None, :]
    P = np.zeros_like(E)
    np.divide(E, pairs, out=P, where=pairs > 0)
    terms = _xlogy(E, P) + _xlogy(pairs - E, 1.0 - P)
    return terms.sum(axis=(-2, -1))


def move_logliks(X, stats: BlockStats, z: np.ndarray, i: int,
                 current: float | None = None) -> np.ndarray:
    """``l_hat(z[i, p])`` for every class ``p`` via count updates of node ``i``.

    Only the block sums touched by node ``i`` are edited: its row and column
    totals move from class ``z_i`` to ``p``, with the self-loop counted once.
    """
    k = stats.k
    c = z[i]
    xii = X[i, i]
    r_other = stats.row_sums[i].copy()  # weights from i into each class, self excluded
    c_other = stats.col_sums[:, i].copy()
    r_other[c] -= xii
    c_other[c] -= xii
    base = stats.block_sums.copy()
    base[c, :] -= r_other
    base[:, c] -= c_other
    base[c, c] -= xii
    eye = np.eye(k)
    E = (base[None]
         + eye[:, :, None] * r_other[None, None, :]
         + c_other[None, :, None] * eye[:, None, :]
         + xii * eye[:, :, None] * eye[:, None, :])
    sizes = stats.sizes[None, :] - eye[c][None, :] + eye
    out = _profile_ll_batch(E, sizes)
    if current is None:
        current = block_loglik(stats.block_sums, stats.sizes, stats.p_hat)
    out[c] = current  # exact value for staying put, so ties resolve cleanly
    return out


def gradient_descent(X, z0, k: int, budget: IterationBudget = IterationBudget(),
                     rtol: float = 1e-12) -> FitResult:
    """Synchronous best single-node moves on the plug-in log-likelihood.

    A node moves only if the gain exceeds ``rtol * |l_hat|``, so round-off
    in the count updates cannot trigger spurious moves between equal
    partitions.
    """
    X, z0 = _check_inputs(X, z0, k)
    n = X.shape[0]

    def sweep(z):
        s = BlockStats(X, z, k)
        current = block_loglik(s.block_sums, s.sizes, s.p_hat)
        cand = np.empty((n, k))
        for i in range(n):
            cand[i] = move_logliks(X, s, z, i, current)
        gain = cand.max(1) - current
        new = best_class(cand, z, maximize=True)
        return np.where(gain > rtol * max(1.0, abs(current)), new, z), current

    z, it, conv, cyc = iterate(z0, sweep, budget, maximize=True)
    s = BlockStats(X, z, k)
    return FitResult(z, s.p_hat, block_loglik(s.block_sums, s.sizes, s.p_hat), it, conv, cyc)


# --- variational EM -------------------------------------------------------------

@dataclass
class VemState:
    rho: np.ndarray  # (N, K) responsibilities
    alpha: np.ndarray  # (K,) class proportions
    p: np.ndarray  # (K, K) clamped block probabilities


@dataclass
class VemResult:
    state: VemState
    labels: np.ndarray
    elbo: list
    iterations: int
    converged: bool

    def as_fit(self) -> FitResult:
        return FitResult(self.labels, self.state.p, self.elbo[-1], self.iterations, self.converged)


def _vem_pair_sums(X, rho):
    """Expected edge weight and pair mass per block, self-pairs weighted by ``rho_ip``."""
    x = np.diag(X)
    num = rho.T @ X @ rho - (rho * x[:, None]).T @ rho + np.diag(rho.T @ x)
    tot = rho.sum(0)
    den = np.outer(tot, tot) - rho.T @ rho + np.diag(tot)
    return num, den


def _m_step(X, rho):
    num, den = _vem_pair_sums(X, rho)
    P = np.zeros_like(num)
    np.divide(num, den, out=P, where=den > 0)
    return rho.mean(0), np.clip(P, EPS, 1.0 - EPS)


def elbo(X, rho, alpha, P) -> float:
    num, den = _vem_pair_sums(X, rho)
    with np.errstate(divide="ignore"):
        log_a = np.log(alpha)
    ent = -_xlogy(rho, rho).sum()
    mask = rho > 0
    prior = float((rho[mask] * np.broadcast_to(log_a, rho.shape)[mask]).sum())
    return prior + ent + float((num * np.log(P) + (den - num) * np.log1p(-P)).sum())


def _e_step(X, rho, alpha, P, tol, max_loops, deadline):
    logP, log1mP = np.log(P), np.log1p(-P)
    with np.errstate(divide="ignore"):
        log_a = np.log(alpha)
    diag_term = None
    n = X.shape[0]
    for _ in range(max_loops):
        change = 0.0
        for i in range(n):
            xii = X[i, i]
            ri = rho[i]
            out_w = X[i] @ rho - xii * ri
            out_n = rho.sum(0) - ri - out_w
            in_w = X[:, i] @ rho - xii * ri
            in_n = rho.sum(0) - ri - in_w
            diag_term = xii * np.diag(logP) + (1 - xii) * np.diag(log1mP)
            s = (log_a + logP @ out_w + log1mP @ out_n + logP.T @ in_w + log1mP.T @ in_n
                 + diag_term)
            s = s - s[np.isfinite(s)].max()
            new = np.exp(s)
            new /= new.sum()
            change = max(change, float(np.abs(new - ri).max()))
            rho[i] = new
        if change < tol or time.perf_counter() > deadline:
            break
    return rho


def vem(X, z0, k: int, budget: IterationBudget = IterationBudget(), tol: float = 1e-6,
        e_tol: float = 1e-6, e_max_loops: int = 50) -> VemResult:
    """Mean-field variational EM for the Bernoulli SBM, started from one-hot ``z0``.

    Node responsibilities are updated one node at a time (coordinate ascent),
    which keeps the evidence lower bound non-decreasing.
    """
    X, z0 = _check_inputs(X, z0, k)
    deadline = time.perf_counter() + budget.max_wall_time
    rho = one_hot(z0, k)
    alpha, P = _m_step(X, rho)
    history = [elbo(X, rho, alpha, P)]
    converged = False
    it = 0
    while it < budget.max_iters and time.perf_counter() < deadline:
        rho = _e_step(X, rho, alpha, P, e_tol, e_max_loops, deadline)
        alpha, P = _m_step(X, rho)
        history.append(elbo(X, rho, alpha, P))
        it += 1
        if history[-1] - history[-2] < tol:
            converged = True
            break
    labels = rho.argmax(1)
    return VemResult(VemState(rho, alpha, P), labels, history, it, converged)
