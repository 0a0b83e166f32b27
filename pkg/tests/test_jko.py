import math

import numpy as np
import pytest

from dyson_lab.errors import NonMonotone
from dyson_lab.functionals import STANDARD, GaussianLaw, gaussian_w2
from dyson_lab.jko import (
    QuantileFunction,
    entropy_q,
    jko_error,
    jko_objective,
    jko_step,
    jko_trajectory,
    quantile_of_gaussian,
    w2_q,
)


def test_quantiles():
    q = quantile_of_gaussian(STANDARD, 513)
    assert q.values[256] == pytest.approx(0.0, abs=1e-15)
    assert np.all(np.diff(q.values) > 0)
    q20 = quantile_of_gaussian(STANDARD, 20)
    assert q20.values[19] == pytest.approx(1.959964, abs=1e-6)
    with pytest.raises(NonMonotone):
        QuantileFunction(np.array([0.0, 0.0, 1.0]))


def test_entropy_values():
    assert entropy_q(quantile_of_gaussian(STANDARD)) == pytest.approx(0.0, abs=1e-4)
    assert entropy_q(quantile_of_gaussian(GaussianLaw(1, 1))) == pytest.approx(0.5, abs=1e-4)
    assert entropy_q(quantile_of_gaussian(GaussianLaw(0.3, 2.0))) == pytest.approx(
        0.5 * (0.09 + 2.0 - 1 - math.log(2.0)), abs=1e-4
    )


def _logistic_quantiles(M):
    u = (np.arange(M) + 0.5) / M
    return QuantileFunction(0.8 * np.log(u / (1 - u)))


def test_entropy_grid_refinement_on_a_non_gaussian_law():
    values = [entropy_q(_logistic_quantiles(M)) for M in (128, 256, 512, 1024)]
    diffs = np.abs(np.diff(values))
    # the discretisation converges, roughly at first order in 1/M
    assert np.all(diffs[1:] < diffs[:-1])
    assert np.all(diffs[:-1] / diffs[1:] > 1.5)


def test_w2_q():
    a = quantile_of_gaussian(STANDARD)
    assert w2_q(a, a) == 0.0
    assert w2_q(a, quantile_of_gaussian(GaussianLaw(1, 1))) == pytest.approx(1.0, abs=1e-6)
    rng = np.random.default_rng(0)
    for _ in range(10):
        g1 = GaussianLaw(rng.normal(), rng.uniform(0.3, 3))
        g2 = GaussianLaw(rng.normal(), rng.uniform(0.3, 3))
        assert w2_q(quantile_of_gaussian(g1), quantile_of_gaussian(g2)) == pytest.approx(gaussian_w2(g1, g2), abs=1e-4)


def test_step_fixed_point_and_mean():
    q = quantile_of_gaussian(STANDARD)
    assert np.max(np.abs(jko_step(q, 0.1).values - q.values)) < 1e-8
    q1 = quantile_of_gaussian(GaussianLaw(1, 1))
    nxt = jko_step(q1, 0.1)
    assert nxt.mean() == pytest.approx(1 / 1.1, abs=1e-4)
    assert jko_objective(nxt, q1, 0.1) < jko_objective(q1, q1, 0.1)


def test_trajectory():
    q = quantile_of_gaussian(STANDARD, 128)
    traj = jko_trajectory(q, 0.25, 1.0)
    assert len(traj) == 5
    assert all(np.max(np.abs(t.values - q.values)) < 1e-8 for t in traj)
    traj = jko_trajectory(quantile_of_gaussian(GaussianLaw(1.0, 3.0), 256), 0.1, 1.0)
    ent = [entropy_q(t) for t in traj]
    assert np.all(np.diff(ent) <= 1e-12)


def test_first_order_convergence():
    e1 = jko_error(GaussianLaw(1, 1), 0.1, 1.0)
    e2 = jko_error(GaussianLaw(1, 1), 0.05, 1.0)
    assert 1.6 <= e1 / e2 <= 2.4
    assert e1 <= 0.2
