import math

import numpy as np
import pytest

from dyson_lab import dpp
from dyson_lab.configspace import Configuration
from dyson_lab.dynamics import Speed
from dyson_lab.errors import EmptySet
from dyson_lab.functionals import STANDARD, GaussianLaw
from dyson_lab.harness import (
    GRADIENT_BANK,
    POSITIVE_BANK,
    CheckReport,
    InitialLaw,
    check_bakry_emery,
    check_bakry_emery_coupled,
    check_brunn_minkowski,
    check_dimension_free_harnack,
    check_evi_gaussian,
    check_evi_monte_carlo,
    check_hwi_gaussian,
    check_log_harnack,
    check_wasserstein_contraction,
    closed_form_suite,
    count_variance_profile,
    evi_integrated_closed_form,
    ou_gradient,
    ou_gradient_bismut,
    shell_occupancy_stats,
    shell_transport,
)
from dyson_lab.model import ModelSpec, Regime
from dyson_lab.sampling import sample_sine_window

BANK = {u.name: u for u in POSITIVE_BANK + GRADIENT_BANK}


def test_report_pass_rule():
    assert CheckReport("a", {}, -0.1, 0.05, 0.02).passed
    assert not CheckReport("a", {}, -0.2, 0.05, 0.02).passed
    assert CheckReport("a", {}, 0.0, 0.0).to_dict()["pass"] is True


def test_evi_examples():
    r = check_evi_gaussian(GaussianLaw(0, 4), STANDARD, [0.0])
    assert r.residual == pytest.approx(-0.5 * (3 - 2 * math.log(2)) + 1.5, abs=1e-12)
    assert check_evi_gaussian(STANDARD, STANDARD, np.linspace(0, 2, 5)).residual == 0.0
    half = check_evi_gaussian(GaussianLaw(0, 4), STANDARD, [0.0], speed=Speed.HALF)
    assert half.residual == pytest.approx(-0.0569, abs=1e-3)
    assert not half.passed


def test_evi_mean_shift_is_an_equality_only_with_unit_curvature():
    t = np.linspace(0, 2, 11)
    flat = check_evi_gaussian(GaussianLaw(1, 1), STANDARD, t)
    assert flat.residual == pytest.approx(0.5 * math.exp(-4.0), abs=1e-12)
    curved = [check_evi_gaussian(GaussianLaw(1, 1), STANDARD, [s], curvature=1.0).residual for s in t]
    assert np.max(np.abs(curved)) <= 1e-12


def test_evi_monte_carlo_one_particle_matches_closed_form():
    model = ModelSpec(Regime.BULK, 1)
    r = check_evi_monte_carlo(model, InitialLaw(1.0, 2.0), InitialLaw(), 0.5, 20000, 3)
    exact = evi_integrated_closed_form(GaussianLaw(1.0, 4.0), STANDARD, 0.5)
    assert r.passed
    assert abs(r.residual - exact) < 3 * r.statistical_error


def test_evi_monte_carlo_contraction_only():
    model = ModelSpec(Regime.BULK, 4)
    r = check_evi_monte_carlo(model, InitialLaw(0.5, 1.2), InitialLaw(), 0.3, 300, 4)
    assert r.passed and "contraction-only" in r.note
    r0 = check_evi_monte_carlo(model, InitialLaw(0.5, 1.2), InitialLaw(), 0.0, 100, 4)
    assert r0.residual == 0.0


def test_contraction_examples():
    model = ModelSpec(Regime.BULK, 1)
    A = np.zeros((50, 1))
    assert check_wasserstein_contraction(model, A, A, (0.1, 0.5), 2.0, 0).residual == 0.0
    B = np.ones((50, 1))
    r = check_wasserstein_contraction(model, A, B, (1.0,), 2.0, 0)
    assert r.residual == pytest.approx(1 - math.exp(-1), rel=2e-3)


def test_harnack_examples():
    u = BANK["gauss_bump"]
    assert check_log_harnack(u, 0.0, 1.0, 0.5).residual >= 0
    same = check_log_harnack(u, 0.7, 0.7, 0.5)
    assert same.residual >= 0
    const = check_log_harnack(BANK["constant"], 0.0, 1.5, 0.5)
    assert const.residual == pytest.approx(1.5**2 / 2.0, abs=1e-12)
    for alpha in (1.5, 2.0):
        assert check_dimension_free_harnack(u, 0.0, 1.0, 0.5, alpha).residual >= 0
        assert check_dimension_free_harnack(u, 0.4, 0.4, 0.5, alpha).residual >= -1e-12
    with pytest.raises(ValueError):
        check_dimension_free_harnack(u, 0, 0, 1, 1.0)


def test_gradient_routes_agree():
    for u in GRADIENT_BANK:
        x = np.linspace(-2, 2, 9)
        assert ou_gradient(u, x, 0.4) == pytest.approx(ou_gradient_bismut(u, x, 0.4), abs=1e-9)


def test_bakry_emery_examples():
    lin = check_bakry_emery(BANK["linear"], 0.5, 1.0)
    assert lin.residual == pytest.approx(2.0 - 2.0 * math.exp(-0.5), abs=1e-10)
    assert check_bakry_emery(BANK["constant"], 0.5, 2.0).residual == 0.0
    for p in (1.0, 2.0):
        assert check_bakry_emery(BANK["sine"], 0.3, p).residual >= -1e-6


def test_bakry_emery_coupled_four_particles():
    r = check_bakry_emery_coupled(ModelSpec(Regime.BULK, 4), np.array([3.0, 1.0, -0.5, -2.5]), 0.3, 2.0, 300, 5)
    assert r.passed


def test_hwi():
    r = check_hwi_gaussian(GaussianLaw(1.5, 1.0), STANDARD)
    assert r.residual == pytest.approx(1.5**2 / 2)
    assert check_hwi_gaussian(STANDARD, STANDARD).residual == 0.0


def test_brunn_minkowski():
    assert check_brunn_minkowski((0, 1), (0, 1), 0.4).residual == pytest.approx(0.0, abs=1e-14)
    assert check_brunn_minkowski((0, 1), (2, 3), 0.5).residual >= 0
    assert check_brunn_minkowski((0, 1), (2, 3), 0.0).residual == pytest.approx(0.0, abs=1e-14)
    assert check_brunn_minkowski((0, 1), (2, 3), 1.0).residual == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(EmptySet):
        check_brunn_minkowski((1, 1), (2, 3), 0.5)


def test_shell_transport():
    img, cost = shell_transport(Configuration((-1.05,)))
    assert img.points == (-1.5,) and cost == pytest.approx(0.45)
    g = Configuration((0.3, 1.2))
    assert shell_transport(g) == (g, 0.0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        _, c = shell_transport(sample_sine_window(200, 8.0, rng))
        assert c**2 <= math.pi**2 / 6


def test_shell_occupancy():
    rows = shell_occupancy_stats(dpp.SINE, 10)
    for r in rows:
        assert r.bound == pytest.approx(1 - math.exp(-1 / r.k), abs=1e-10)
        assert r.bound >= 1 / (2 * r.k)
        assert r.occupancy >= r.bound - 1e-9
    sums = np.cumsum([r.occupancy for r in rows])
    assert np.all(np.diff(sums) > 0)


def test_shell_occupancy_monte_carlo():
    rows = shell_occupancy_stats(dpp.SINE, 5, n_samples=3000, rng=np.random.default_rng(1), n_gue=200)
    for r in rows:
        assert abs(r.mc_frequency - r.occupancy) < 3 * r.mc_error


def test_count_variance_profile():
    rng = np.random.default_rng(2)
    samples = [sample_sine_window(200, 2.0, rng) for _ in range(3000)]
    rows = count_variance_profile(samples, (0.5, 1.0, 2.0))
    for r in rows:
        assert abs(r.variance - r.predicted_variance) < 3 * r.variance_error
        assert r.variance < r.mean and r.sub_poisson
    tiny = count_variance_profile(samples, (1e-4,))[0]
    assert tiny.predicted_mean < 1e-3 and tiny.predicted_variance < 1e-3


def test_closed_form_suite_is_green():
    reports = closed_form_suite(7)
    assert all(r.passed for r in reports)
    assert min(r.residual for r in reports) >= -1e-8
