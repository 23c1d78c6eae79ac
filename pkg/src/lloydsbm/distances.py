"""Distances between profile vectors: l1, l2 and Huber."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_HUBER_R = 0.05


@dataclass(frozen=True)
class DistanceKind:
    name: str  # "l1", "l2" or "huber"
    r: float | None = None

    def __post_init__(self):
        if self.name not in ("l1", "l2", "huber"):
            raise ValueError(f"unknown distance {self.name!r}")
        if self.name == "huber":
            if self.r is None or not self.r > 0:
                raise ValueError("Huber distance needs r > 0")
        elif self.r is not None:
            raise ValueError(f"{self.name} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "DistanceKind":
        """Parse the CLI spelling ``l1``, ``l2`` or ``huber:<r>`` (``huber`` alone uses r=0.05)."""
        text = text.strip().lower()
        if text.startswith("huber"):
            _, _, r = text.partition(":")
            return cls("huber", float(r) if r else DEFAULT_HUBER_R)
        return cls(text)

    def __str__(self):
        return f"huber:{self.r:g}" if self.name == "huber" else self.name


L1 = DistanceKind("l1")
L2 = DistanceKind("l2")


def huber(u, r: float) -> np.ndarray:
    """Elementwise ``u**2/2`` for ``|u| <= r`` and ``r|u| - r**2/2`` beyond."""
    a = np.abs(u)
    return np.where(a <= r, 0.5 * a * a, r * a - 0.5 * r * r)


def _reduce(diff: np.ndarray, kind: DistanceKind) -> np.ndarray:
    if kind.name == "l1":
        return np.abs(diff).sum(axis=-1)
    if kind.name == "l2":
        return np.sqrt((diff * diff).sum(axis=-1))
    return huber(diff, kind.r).sum(axis=-1)


def distance(x, y, kind: DistanceKind = L1) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    return float(_reduce(x - y, kind))


def pairwise(A: np.ndarray, B: np.ndarray, kind: DistanceKind = L1) -> np.ndarray:
    """``D[i, p] = d(A[i], B[p])`` for row-stacked vectors."""
    return _reduce(A[:, None, :] - B[None, :, :], kind)
