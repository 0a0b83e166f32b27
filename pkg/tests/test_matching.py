import math

import numpy as np
import pytest

from dyson_lab.configspace import from_points
from dyson_lab.errors import InfiniteDistance, OutOfWindow, TooLarge
from dyson_lab.matching import (
    INFINITE,
    brute_force_partial,
    glued_distance,
    glued_product_distance,
    interpolate,
    matching_distance,
    optimal_matching,
    pair_or_kill_distance,
    partial_matching_distance,
    partial_matching_plan,
    solve_assignment,
)


def test_matching_distance_examples():
    assert matching_distance(from_points([0, 1]), from_points([0.1, 0.9])) == pytest.approx(math.sqrt(0.02), abs=1e-12)
    assert matching_distance(from_points([0, 1]), from_points([0.5]), 1.0) == INFINITE
    g = from_points([0.3, -1.2, 4.0])
    assert matching_distance(g, g) == 0.0


def test_matching_distance_matches_permutation_search(rng):
    from itertools import permutations

    for _ in range(50):
        n = int(rng.integers(1, 6))
        x, y = rng.normal(size=n), rng.normal(size=n)
        for p in (1.0, 2.0, 3.0):
            best = min(sum(abs(x[i] - y[s[i]]) ** p for i in range(n)) for s in permutations(range(n)))
            assert matching_distance(from_points(x), from_points(y), p) == pytest.approx(best ** (1 / p), abs=1e-12)


def test_planar_points_use_the_assignment_solver(rng):
    x = rng.normal(size=(4, 2))
    perm, value = optimal_matching(x, x[[2, 0, 3, 1]], 2.0)
    assert value == pytest.approx(0.0, abs=1e-14)


def test_glued_distance_examples():
    assert glued_distance(0.9, -0.9, 1.0) == pytest.approx(0.2)
    assert glued_distance(0.4, 0.4, 1.0) == 0.0
    assert glued_distance(0.9, 0.5, 1.0) == pytest.approx(0.4)
    with pytest.raises(OutOfWindow):
        glued_distance(1.5, 0.0, 1.0)


@pytest.mark.parametrize(
    "g, h, r, expected",
    [
        ([0.5], [0.4, 0.95], 1.0, math.sqrt(0.0125)),
        ([0.2, -0.3], [0.2, -0.3], 1.0, 0.0),
        # two separate kills at 0.1 each beat both the direct pair and a kill-kill path
        ([0.9], [-0.9], 1.0, math.sqrt(0.02)),
        ([0.5, 0.6], [], 1.0, math.sqrt(0.25 + 0.16)),
        ([], [], 1.0, 0.0),
    ],
)
def test_partial_examples_and_oracle(g, h, r, expected):
    assert partial_matching_distance(from_points(g), from_points(h), r) == pytest.approx(expected, abs=1e-12)
    assert brute_force_partial(from_points(g), from_points(h), r) == pytest.approx(expected, abs=1e-12)


def test_partial_plan_accounts_for_every_point():
    value, plan = partial_matching_plan(from_points([0.5]), from_points([0.4, 0.95]), 1.0)
    assert plan.pairs == ((0, 0),)
    assert plan.killed_left == ()
    assert plan.killed_right == (1,)


def test_partial_ignores_points_outside_window():
    assert partial_matching_distance(from_points([0.2, 3.0]), from_points([0.2, -7.0]), 1.0) == 0.0


def test_brute_force_size_limit():
    with pytest.raises(TooLarge):
        brute_force_partial(from_points(np.linspace(-0.9, 0.9, 9)), from_points([]), 1.0)


def test_equal_counts_pair_or_kill_identity(rng):
    for _ in range(200):
        k = int(rng.integers(1, 5))
        r = float(rng.uniform(0.5, 2))
        g = from_points(rng.uniform(-r, r, k) * 0.999)
        h = from_points(rng.uniform(-r, r, k) * 0.999)
        d = partial_matching_distance(g, h, r)
        assert pair_or_kill_distance(g, h, r) == pytest.approx(d, abs=1e-12)
        glued = glued_product_distance(g, h, r)
        assert d - 1e-12 <= glued <= math.sqrt(2) * d + 1e-12


def test_glued_product_differs_from_partial_on_a_kill_kill_pair():
    g, h = from_points([0.9]), from_points([-0.9])
    assert partial_matching_distance(g, h, 1.0) == pytest.approx(math.sqrt(0.02))
    assert glued_product_distance(g, h, 1.0) == pytest.approx(0.2)


def test_glued_identity_cannot_coexist_with_monotonicity():
    # a glued-product value at r = 1 that a larger window must undercut
    d = 1e-3
    g, h = from_points([0.9, 1 + d]), from_points([-0.9, -1 - d])
    assert glued_product_distance(g, h, 1.0) == pytest.approx(0.2)
    assert glued_product_distance(g, h, 1 + 2 * d) < 0.15
    assert partial_matching_distance(g, h, 1.0) <= partial_matching_distance(g, h, 1 + 2 * d)


def test_interpolate():
    g, h = from_points([0, 1]), from_points([0.1, 0.9])
    assert interpolate(g, h, 0.5).points == pytest.approx((0.05, 0.95))
    assert interpolate(g, h, 0.0) == g
    assert interpolate(g, h, 1.0).points == pytest.approx(h.points)
    assert interpolate(g, g, 0.3) == g
    with pytest.raises(InfiniteDistance):
        interpolate(g, from_points([0.0]), 0.5)


def test_lexicographic_tie_break():
    cost = np.zeros((3, 3))
    perm, value = solve_assignment(cost, lexicographic=True)
    assert list(perm) == [0, 1, 2] and value == 0.0


def test_partial_reaches_full_distance_once_kills_are_dearer(rng):
    for _ in range(300):
        k = int(rng.integers(1, 6))
        g, h = from_points(rng.normal(0, 2, k)), from_points(rng.normal(0, 2, k))
        reach = max(np.max(np.abs(g.array)), np.max(np.abs(h.array)))
        d = matching_distance(g, h)
        assert partial_matching_distance(g, h, reach + d + 1e-9) == pytest.approx(d, abs=1e-12)


def test_partial_below_full_just_past_the_points():
    # a point just inside the window is nearly free to kill
    g, h = from_points([0.0, 1.0]), from_points([0.0, -1.0])
    assert partial_matching_distance(g, h, 1.01) < matching_distance(g, h)
