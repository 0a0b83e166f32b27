import math

import numpy as np
import pytest

from dyson_lab.configspace import EmpiricalLaw, WeylPoint
from dyson_lab.dynamics import (
    SdeConfig,
    Speed,
    drift,
    evolve,
    evolve_batch,
    evolve_coupled,
    evolve_coupled_batch,
    evolve_ensemble,
    step,
)
from dyson_lab.model import ModelSpec, Regime, grad_hamiltonian, hamiltonian
from dyson_lab.sampling import exact_rescaled_sample

BULK1 = ModelSpec(Regime.BULK, 1)


def test_zero_noise_euler_step():
    out = step(BULK1, WeylPoint((2.0,)), 1e-3, np.zeros(1), SdeConfig())
    assert out.coords[0] == pytest.approx(2.0 * (1 - 1e-3), abs=1e-15)


def test_drift_speeds():
    m = ModelSpec(Regime.BULK, 3)
    x = np.array([1.0, 0.0, -2.0])
    assert drift(m, x, SdeConfig()) == pytest.approx(-grad_hamiltonian(m, x))
    assert drift(m, x, SdeConfig(speed=Speed.HALF)) == pytest.approx(-0.5 * grad_hamiltonian(m, x))


def test_step_matches_compiled_kernel():
    # a crowded start forces several halvings of the base step
    m = ModelSpec(Regime.BULK, 3)
    x0 = np.array([0.3, 0.2, -0.5])
    cfg = SdeConfig(dt=1e-2)
    g = np.random.default_rng(0)
    dw = math.sqrt(cfg.dt) * g.standard_normal(3)
    a = step(m, x0, cfg.dt, dw, cfg, g)
    b = evolve(m, x0, cfg.dt, cfg, np.random.default_rng(0))
    assert np.all(np.diff(a.coords) < 0)
    assert a.coords == b.coords


def test_order_kept_over_many_steps():
    m = ModelSpec(Regime.BULK, 8)
    x = exact_rescaled_sample(m, 0, 4)
    out = evolve_batch(m, x, 25.0, SdeConfig(dt=1e-3), np.random.default_rng(1))
    assert np.all(np.diff(out, axis=1) < 0)


def test_t_zero_returns_start():
    w = WeylPoint((1.0, -1.0))
    assert evolve(ModelSpec(Regime.BULK, 2), w, 0.0, SdeConfig(), 0) == w


def test_one_particle_terminal_law():
    n, t, m0, v0 = 10000, 0.7, 1.5, 0.25
    g = np.random.default_rng(2)
    x0 = m0 + math.sqrt(v0) * g.standard_normal((n, 1))
    x = evolve_batch(BULK1, x0, t, SdeConfig(dt=1e-3), g)[:, 0]
    mean, var = m0 * math.exp(-t), 1 + (v0 - 1) * math.exp(-2 * t)
    assert abs(x.mean() - mean) < 3 * math.sqrt(var / n)
    assert abs(x.var() - var) < 3 * var * math.sqrt(2 / n)


def test_half_speed_is_a_time_change():
    n = 8000
    g = np.random.default_rng(3)
    x0 = np.full((n, 1), 2.0)
    full = evolve_batch(BULK1, x0, 0.5, SdeConfig(dt=1e-3), g)[:, 0]
    half = evolve_batch(BULK1, x0, 1.0, SdeConfig(dt=1e-3, speed=Speed.HALF), g)[:, 0]
    se = math.hypot(full.std(), half.std()) / math.sqrt(n)
    assert abs(full.mean() - half.mean()) < 3 * se
    assert half.var() == pytest.approx(full.var(), rel=0.1)


def test_coupled_one_particle_distance_is_exponential():
    trace = evolve_coupled(BULK1, WeylPoint((1.0,)), WeylPoint((0.0,)), 1.0, SdeConfig(dt=1e-3), 0)
    assert trace.distances[-1] == pytest.approx(math.exp(-1.0), rel=2e-3)
    assert trace.times[-1] == pytest.approx(1.0)


def test_coupled_identical_starts_stay_together():
    w = WeylPoint((1.0, 0.0, -1.0))
    trace = evolve_coupled(ModelSpec(Regime.BULK, 3), w, w, 0.5, SdeConfig(), 4)
    assert np.all(trace.distances == 0.0)


@pytest.mark.parametrize("k", [2, 4, 8])
def test_coupled_distance_nonincreasing(k):
    m = ModelSpec(Regime.BULK, k)
    g = np.random.default_rng(k)
    x0 = exact_rescaled_sample(m, g, 20)
    y0 = exact_rescaled_sample(m, g, 20)
    cfg = SdeConfig(dt=1e-3)
    _, _, trace = evolve_coupled_batch(m, x0, y0, 1.0, cfg, g, record=True)
    assert np.max(np.diff(trace, axis=0)) <= 1e-6 * cfg.dt


def test_ensemble_is_deterministic_and_reduces_to_evolve():
    m = ModelSpec(Regime.BULK, 3)
    law = EmpiricalLaw.from_arrays([[1.0, 0.0, -1.0]])
    a = evolve_ensemble(m, law, 0.2, SdeConfig(), 7)
    b = evolve_ensemble(m, law, 0.2, SdeConfig(), 7)
    assert a == b
    single = evolve(m, WeylPoint((1.0, 0.0, -1.0)), 0.2, SdeConfig(), 7)
    assert a.members[0].points == pytest.approx(sorted(single.coords))


def test_relaxation_towards_equilibrium_energy():
    m = ModelSpec(Regime.BULK, 4)
    g = np.random.default_rng(5)
    start = 3.0 * exact_rescaled_sample(m, g, 2000)
    x = evolve_batch(m, start, 10.0, SdeConfig(dt=1e-3), g)
    eq = hamiltonian(m, exact_rescaled_sample(m, g, 2000))
    h = hamiltonian(m, x)
    se = math.hypot(h.std(), eq.std()) / math.sqrt(2000)
    assert abs(h.mean() - eq.mean()) < 3 * se
