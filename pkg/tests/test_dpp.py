import math

import pytest
from scipy.integrate import quad
from scipy.special import airy

from dyson_lab import dpp
from dyson_lab.errors import DegenerateInterval, InvalidInterval


def test_kernel_values():
    assert dpp.kernel_eval(dpp.SINE, 0.3, 0.3) == pytest.approx(1.0)
    assert dpp.kernel_eval(dpp.SINE, 1.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    ai, aip, _, _ = airy(0.7)
    assert dpp.kernel_eval(dpp.AIRY, 0.7, 0.7) == pytest.approx(aip**2 - 0.7 * ai**2, rel=1e-10)
    assert dpp.KernelSpec.parse("airy") is not None


def test_airy_kernel_off_diagonal_matches_formula():
    x, y = 0.4, -1.1
    (ax, apx, _, _), (ay, apy, _, _) = airy(x), airy(y)
    expected = (ax * apy - apx * ay) / (x - y)
    assert dpp.kernel_eval(dpp.AIRY, x, y) == pytest.approx(expected, rel=1e-10)


def test_sine_trace_is_window_length():
    assert dpp.discretize(dpp.SINE, -1, 1, 100).trace == pytest.approx(2.0, abs=1e-10)
    assert dpp.discretize(dpp.SINE, -2.5, 2.5).trace == pytest.approx(5.0, abs=1e-10)


def test_airy_trace_against_adaptive_quadrature():
    def diag(x):
        ai, aip, _, _ = airy(x)
        return aip**2 - x * ai**2

    ref, _ = quad(diag, 0.0, 10.0, epsabs=1e-13, limit=200)
    assert dpp.discretize(dpp.AIRY, 0.0, 10.0, 200).trace == pytest.approx(ref, abs=1e-8)
    mean, var = dpp.count_moments(dpp.AIRY, 0.0, 10.0)
    assert mean == pytest.approx(ref, abs=1e-8)
    assert 0 < var < mean


def test_degenerate_interval():
    with pytest.raises(DegenerateInterval):
        dpp.discretize(dpp.SINE, 1.0, 1.0)
    assert dpp.gap_probability(dpp.SINE, 0.3, 0.3).probability == 1.0
    with pytest.raises(InvalidInterval):
        dpp.gap_probability(dpp.SINE, 1.0, 0.0)


def test_determinant_derivative_is_trace():
    op = dpp.discretize(dpp.SINE, -0.8, 0.8)
    assert dpp.fredholm_det(op, 0.0) == 1.0
    h = 1e-5
    fd = (dpp.fredholm_det(op, h) - dpp.fredholm_det(op, -h)) / (2 * h)
    assert fd == pytest.approx(1.6, abs=1e-6)


def test_generating_function():
    for r in (0.5, 1.0, 3.0):
        assert dpp.generating_function(dpp.SINE, r, 1.0) == 1.0
        assert dpp.generating_function_derivative(dpp.SINE, r, 1.0) == pytest.approx(2 * r, abs=1e-10)
        h = 1e-5
        fd = (dpp.generating_function(dpp.SINE, r, 1 + h) - dpp.generating_function(dpp.SINE, r, 1 - h)) / (2 * h)
        assert fd == pytest.approx(2 * r, abs=1e-6)
    value, bound = dpp.afd_condition(dpp.SINE, 1.0)
    assert bound == pytest.approx(math.exp(2 * (math.sqrt(2) - 1)))
    assert 1.0 < value <= bound


def test_gap_bound_on_unit_shell():
    res = dpp.gap_probability(dpp.SINE, -2.0, -1.0)
    assert res.bound == pytest.approx(math.exp(-1), abs=1e-10)
    assert res.probability <= math.exp(-1) + 1e-9
    assert 1 - res.probability >= 1 - math.exp(-1)


def test_sine_count_variance_below_mean():
    mean, var = dpp.count_moments(dpp.SINE, -1.0, 1.0)
    assert mean == pytest.approx(2.0, abs=1e-10)
    assert 0 < var < mean


def test_node_doubling_is_stable():
    for spec, a, b in ((dpp.SINE, -1.0, 1.0), (dpp.AIRY, -2.0, 8.0)):
        coarse = dpp.fredholm_det(dpp.discretize(spec, a, b, 60), -1.0)
        fine = dpp.fredholm_det(dpp.discretize(spec, a, b, 120), -1.0)
        assert abs(coarse - fine) <= 1e-8


def test_eigenvalues_in_unit_interval():
    lam = dpp.discretize(dpp.SINE, -3, 3).eigenvalues
    assert lam.min() > -1e-8 and lam.max() < 1 + 1e-8
