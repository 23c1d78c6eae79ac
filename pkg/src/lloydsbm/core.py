"""Graph and label primitives shared by every other module.

Graphs are dense ``(N, N)`` float arrays with weights in ``[0, 1]``; entry
``(i, j)`` is the weight of the directed edge ``i -> j`` and self-loops are
kept.  Labels are integer arrays.  Inside the library labels are 0-based
(``0 .. K-1``); the text file formats and the CLI use 1-based labels.
"""

from __future__ import annotations

from pathlib import Path
from typing import NamedTuple

import numpy as np


class ClassPartition(NamedTuple):
    index_sets: list[np.ndarray]
    sizes: np.ndarray


def check_graph(X) -> np.ndarray:
    """Return ``X`` as a float array after validating shape and weight range."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"graph must be a square matrix, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("graph is empty")
    if not np.all(np.isfinite(X)):
        raise ValueError("graph weights must be finite")
    if X.min() < 0.0 or X.max() > 1.0:
        raise ValueError("graph weights must lie in [0, 1]")
    return X


def check_labels(z, k: int, n: int | None = None) -> np.ndarray:
    """Return ``z`` as an int array with every entry in ``0 .. k-1``."""
    z = np.asarray(z)
    if z.ndim != 1:
        raise ValueError("labels must be a 1-d sequence")
    if z.size and not np.issubdtype(z.dtype, np.integer):
        if not np.all(np.mod(z, 1) == 0):
            raise ValueError("labels must be integers")
    z = z.astype(np.int64)
    if k < 1:
        raise ValueError("k must be positive")
    if z.size and (z.min() < 0 or z.max() >= k):
        raise ValueError(f"labels must lie in 0..{k - 1}")
    if n is not None and z.size != n:
        raise ValueError(f"expected {n} labels, got {z.size}")
    return z


def one_hot(z: np.ndarray, k: int) -> np.ndarray:
    Z = np.zeros((z.size, k))
    Z[np.arange(z.size), z] = 1.0
    return Z


def class_sizes(z: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(z, minlength=k)


def partition(z, k: int) -> ClassPartition:
    """Index sets ``I_p(z)`` and sizes ``N_p(z)``; empty classes are allowed."""
    z = check_labels(z, k)
    sets = [np.flatnonzero(z == p) for p in range(k)]
    return ClassPartition(sets, class_sizes(z, k))


def cross_counts(z, z_star, k: int) -> np.ndarray:
    """``counts[p, q] = #{i : z_i = p and z*_i = q}``."""
    z = check_labels(z, k)
    z_star = check_labels(z_star, k)
    if z.size != z_star.size:
        raise ValueError("label vectors have different lengths")
    counts = np.zeros((k, k), dtype=np.int64)
    np.add.at(counts, (z, z_star), 1)
    return counts


def canonical(z) -> np.ndarray:
    """Relabel classes in order of first appearance (0, 1, 2, ...)."""
    z = np.asarray(z)
    if z.size == 0:
        return z.astype(np.int64)
    _, first, inv = np.unique(z, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inv.ravel()]


def relabel(z, perm) -> np.ndarray:
    """Apply the label map ``p -> perm[p]``."""
    return np.asarray(perm)[np.asarray(z)]


# --- text formats -----------------------------------------------------------

def read_graph(path) -> np.ndarray:
    """Read the dense format: first line ``N``, then ``N`` rows of ``N`` weights."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    n = int(lines[0].split()[0])
    rows = [ln.split() for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"{path}: expected {n} rows of {n} weights")
    return check_graph(np.array(rows, dtype=float))


def write_graph(path, X) -> None:
    X = check_graph(X)
    out = [str(X.shape[0])]
    out += [" ".join(repr(float(v)) for v in row) for row in X]
    Path(path).write_text("\n".join(out) + "\n")


def read_labels(path, k: int | None = None) -> np.ndarray:
    """Read one 1-based label per line; returns 0-based labels."""
    vals = [int(ln) for ln in Path(path).read_text().split()]
    z = np.array(vals, dtype=np.int64) - 1
    if z.size and z.min() < 0:
        raise ValueError(f"{path}: labels are 1-based")
    if k is not None:
        check_labels(z, k)
    return z


def write_labels(path, z) -> None:
    z = np.asarray(z, dtype=np.int64)
    Path(path).write_text("".join(f"{v + 1}\n" for v in z))
