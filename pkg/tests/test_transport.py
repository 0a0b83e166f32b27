import math

import numpy as np
import pytest

from dyson_lab.configspace import EmpiricalLaw, from_points
from dyson_lab.errors import InfiniteDistance, SizeMismatch
from dyson_lab.matching import matching_distance
from dyson_lab.transport import (
    FULL,
    brute_force_wasserstein,
    displacement,
    optimal_plan,
    partial,
    wasserstein,
    wasserstein_arrays,
)


def _law(rng, n, k):
    return EmpiricalLaw.from_arrays(rng.normal(size=(n, k)))


def test_identical_and_singleton_laws(rng):
    A = _law(rng, 5, 3)
    assert wasserstein(A, A) == 0.0
    assert optimal_plan(A, A).assignment == tuple(range(5))
    g, h = from_points([0, 1]), from_points([0.1, 0.9])
    assert wasserstein(EmpiricalLaw((g,)), EmpiricalLaw((h,))) == pytest.approx(matching_distance(g, h))


def test_brute_force_agreement(rng):
    for ground in (FULL, partial(1.0)):
        for p in (1.0, 2.0):
            A, B = _law(rng, 4, 3), _law(rng, 4, 3)
            assert wasserstein(A, B, p, ground) == pytest.approx(brute_force_wasserstein(A, B, p, ground), abs=1e-12)


def test_non_crossing_plan():
    A = EmpiricalLaw.from_arrays([[0.0], [10.0]])
    B = EmpiricalLaw.from_arrays([[10.5], [0.5]])
    plan = optimal_plan(A, B)
    assert plan.assignment == (1, 0)
    assert plan.cost == pytest.approx(wasserstein(A, B))


def test_infinite_cost_propagates():
    A = EmpiricalLaw.from_arrays([[0.0], [1.0, 2.0]])
    B = EmpiricalLaw.from_arrays([[0.0, 1.0], [3.0, 4.0]])
    assert wasserstein(A, B) == math.inf
    with pytest.raises(InfiniteDistance):
        displacement(A, B, 0.5)
    C = EmpiricalLaw.from_arrays([[5.0, 1.0], [0.2]])
    assert math.isfinite(wasserstein(A, C))


def test_size_mismatch(rng):
    with pytest.raises(SizeMismatch):
        wasserstein(_law(rng, 2, 1), _law(rng, 3, 1))


def test_displacement_is_a_geodesic(rng):
    A, B = _law(rng, 6, 3), _law(rng, 6, 3)
    w = wasserstein(A, B)
    assert displacement(A, B, 0.0) == A
    assert wasserstein(displacement(A, B, 1.0), B) == pytest.approx(0.0, abs=1e-12)
    for s, t in ((0.2, 0.7), (0.0, 0.5), (0.3, 1.0)):
        assert wasserstein(displacement(A, B, s), displacement(A, B, t)) == pytest.approx(abs(s - t) * w, abs=1e-10)
    g, h = from_points([0, 1]), from_points([0.1, 0.9])
    mid = displacement(EmpiricalLaw((g,)), EmpiricalLaw((h,)), 0.5)
    assert mid.members[0].points == pytest.approx((0.05, 0.95))


def test_arrays_agree_with_laws(rng):
    X = np.sort(rng.normal(size=(7, 3)), axis=1)
    Y = np.sort(rng.normal(size=(7, 3)), axis=1)
    value, _ = wasserstein_arrays(X, Y, 2.0)
    assert value == pytest.approx(wasserstein(EmpiricalLaw.from_arrays(X), EmpiricalLaw.from_arrays(Y)), abs=1e-12)
