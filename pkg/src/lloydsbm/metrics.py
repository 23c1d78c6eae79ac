"""Pairwise label-disagreement scores.

``delta_mismatch(z, z2)`` is the normalised count of ordered pairs that share
a class in ``z`` but are split by ``z2``; ``gamma`` is its symmetrised
version and vanishes exactly when the two labelings induce the same
partition.  Both are computed from the contingency table in O(N + K^2);
``*_pairwise`` variants do the literal O(N^2) double sum for cross-checks.
"""

from __future__ import annotations

import numpy as np


def _prep(z, z2, k):
    z = np.asarray(z, dtype=np.int64)
    z2 = np.asarray(z2, dtype=np.int64)
    if z.shape != z2.shape or z.ndim != 1:
        raise ValueError("label vectors must be 1-d and of equal length")
    if k is None:
        k = int(max(z.max(), z2.max())) + 1 if z.size else 2
    if k < 2:
        raise ValueError("metrics need k >= 2")
    return z, z2, k


def _same_pairs(z):
    return float((np.bincount(z).astype(float) ** 2).sum())


def _joint_pairs(z, z2):
    _, counts = np.unique(np.stack([z, z2]), axis=1, return_counts=True)
    return float((counts.astype(float) ** 2).sum())


def delta_mismatch(z, z2, k: int | None = None) -> float:
    z, z2, k = _prep(z, z2, k)
    n = z.size
    return k / (n * n * (k - 1)) * (_same_pairs(z) - _joint_pairs(z, z2))


def gamma(z, z2, k: int | None = None) -> float:
    z, z2, k = _prep(z, z2, k)
    n = z.size
    joint = _joint_pairs(z, z2)
    return k / (2 * n * n * (k - 1)) * (_same_pairs(z) + _same_pairs(z2) - 2 * joint)


def gamma_raw(z, z2, k: int | None = None) -> float:
    """The score with the second indicator taken as ``z2_i != z2_j``.

    Kept for auditing only: it equals ``k / (2(k-1))`` at ``z2 == z`` and so
    is not zero on identical labelings.
    """
    z, z2, k = _prep(z, z2, k)
    n = z.size
    joint = _joint_pairs(z, z2)
    disagree = _same_pairs(z) + _same_pairs(z2) - 2 * joint
    return k / (2 * n * n * (k - 1)) * (n * n - disagree)


def delta_mismatch_pairwise(z, z2, k: int | None = None) -> float:
    z, z2, k = _prep(z, z2, k)
    n = z.size
    same = z[:, None] == z[None, :]
    split = z2[:, None] != z2[None, :]
    return k / (n * n * (k - 1)) * float((same & split).sum())


def gamma_pairwise(z, z2, k: int | None = None) -> float:
    z, z2, k = _prep(z, z2, k)
    n = z.size
    a = (z[:, None] == z[None, :]).astype(int)
    b = (z2[:, None] == z2[None, :]).astype(int)
    return k / (2 * n * n * (k - 1)) * float(np.abs(a - b).sum())
