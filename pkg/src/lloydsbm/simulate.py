"""Planted-partition generators for the simulation protocol.

Randomness comes from numpy ``Generator`` objects (PCG64).  Anything taking
``seed`` accepts an int, a ``SeedSequence`` or an existing ``Generator``.
Per-replication streams are derived with :func:`replication_seed`, which
hashes ``(master seed, *keys)`` through ``SeedSequence`` so results do not
depend on execution order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import check_labels

K_PROTOCOL = 3


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def replication_seed(master: int, *keys: int) -> int:
    """A 64-bit seed for one replication, derived from the master seed."""
    ss = np.random.SeedSequence([int(master), *map(int, keys)])
    return int(ss.generate_state(1, np.uint64)[0])


def asym_b_prime(a: float, b: float) -> float:
    return b + (a - b) / a


def p_sym(a: float, b: float) -> np.ndarray:
    _check_unit(a=a, b=b)
    P = np.full((3, 3), float(b))
    np.fill_diagonal(P, a)
    return P


def p_asym(a: float, b: float) -> np.ndarray:
    """Cyclic 3x3 matrix with ``b`` and ``b' = b + (a - b)/a`` off the diagonal."""
    _check_unit(a=a, b=b)
    if a <= 0:
        raise ValueError("p_asym needs a > 0")
    bp = asym_b_prime(a, b)
    if not 0.0 <= bp <= 1.0:
        raise ValueError(f"b' = {bp:.6g} falls outside [0, 1] for a={a}, b={b}")
    return np.array([[a, b, bp], [bp, a, b], [b, bp, a]], dtype=float)


def label_law(h: float) -> np.ndarray:
    _check_unit(h=h)
    return np.array([(1 - h) / 3, 1 / 3, (1 + h) / 3])


def sample_labels(n: int, h: float, seed) -> np.ndarray:
    """i.i.d. labels in ``0..2`` with class sizes skewed by ``h``."""
    return rng_from(seed).choice(3, size=n, p=label_law(h))


def sample_bernoulli_sbm(z, P, seed) -> np.ndarray:
    """Independent ``Bernoulli(P[z_i, z_j])`` entries over all ordered pairs."""
    P = np.asarray(P, dtype=float)
    if P.min() < 0 or P.max() > 1:
        raise ValueError("probabilities must lie in [0, 1]")
    z = check_labels(z, P.shape[0])
    probs = P[np.ix_(z, z)]
    return (rng_from(seed).random(probs.shape) < probs).astype(float)


def noisy_init(z_star, omega: float, k: int, seed, max_tries: int = 100_000) -> np.ndarray:
    """Replace each label with prob. ``omega`` by a uniform draw; redraw until all ``k`` labels appear."""
    _check_unit(omega=omega)
    z_star = check_labels(z_star, k)
    if k > z_star.size:
        raise ValueError(f"cannot place {k} labels on {z_star.size} nodes")
    rng = rng_from(seed)
    for _ in range(max_tries):
        flip = rng.random(z_star.size) < omega
        draw = rng.integers(0, k, z_star.size)
        z0 = np.where(flip, draw, z_star)
        if np.unique(z0).size == k:
            return z0
    raise RuntimeError("no surjective initialization found; is omega 0 with a missing label?")


@dataclass(frozen=True)
class ExperimentPoint:
    n: int
    family: str  # "sym" or "asym"
    a: float
    b: float
    h: float
    omega: float

    def __post_init__(self):
        if self.n < K_PROTOCOL:
            raise ValueError("n must be at least 3")
        if self.family not in ("sym", "asym"):
            raise ValueError(f"unknown matrix family {self.family!r}")
        _check_unit(a=self.a, b=self.b, h=self.h, omega=self.omega)
        self.matrix()  # validates b' for the asymmetric family

    def matrix(self) -> np.ndarray:
        return p_sym(self.a, self.b) if self.family == "sym" else p_asym(self.a, self.b)


def sample_instance(point: ExperimentPoint, seed):
    """Draw ``(z_star, X, z0)`` for one replication from three child streams."""
    ss = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    s_lab, s_graph, s_init = ss.spawn(3)
    z_star = sample_labels(point.n, point.h, s_lab)
    X = sample_bernoulli_sbm(z_star, point.matrix(), s_graph)
    # noisy_init would spin forever if z_star misses a label and omega == 0
    if point.omega == 0 and np.unique(z_star).size < K_PROTOCOL:
        z0 = z_star.copy()
    else:
        z0 = noisy_init(z_star, point.omega, K_PROTOCOL, s_init)
    return z_star, X, z0


def _check_unit(**vals):
    for name, v in vals.items():
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} must lie in [0, 1]")
