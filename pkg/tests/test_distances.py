import numpy as np
import pytest
from hypothesis import given, strategies as st

from lloydsbm.distances import L1, L2, DistanceKind, distance, huber, pairwise


def test_parse_and_str():
    assert DistanceKind.parse("l1") == L1
    assert DistanceKind.parse("L2") == L2
    h = DistanceKind.parse("huber:0.1")
    assert h.r == 0.1 and str(h) == "huber:0.1"
    assert DistanceKind.parse("huber").r == 0.05
    for bad in ("l3", "huber:0", "huber:-1"):
        with pytest.raises(ValueError):
            DistanceKind.parse(bad)


def test_hand_values():
    assert distance([0, 0], [3, 4], L1) == 7
    assert distance([0, 0], [3, 4], L2) == 5
    # inside the quadratic zone and on the linear branch
    assert distance([0.0], [0.04], DistanceKind("huber", 0.05)) == pytest.approx(0.0008)
    assert distance([0.0], [1.0], DistanceKind("huber", 0.05)) == pytest.approx(0.05 - 0.00125)


def test_length_mismatch():
    with pytest.raises(ValueError):
        distance([0, 1], [0, 1, 2])


@given(st.floats(0.001, 2), st.floats(-5, 5))
def test_huber_continuous_and_bounded(r, u):
    v = float(huber(u, r))
    assert v >= 0
    assert v <= min(0.5 * u * u, r * abs(u)) + 1e-12
    assert float(huber(r, r)) == pytest.approx(0.5 * r * r)


def test_pairwise_matches_scalar(rng):
    A, B = rng.random((6, 4)), rng.random((3, 4))
    for kind in (L1, L2, DistanceKind("huber", 0.2)):
        D = pairwise(A, B, kind)
        ref = [[distance(a, b, kind) for b in B] for a in A]
        assert np.allclose(D, ref, atol=1e-14)
