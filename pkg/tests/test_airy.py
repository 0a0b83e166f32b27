import numpy as np
import pytest
from scipy.special import airy

from dyson_lab.airy import airy_ai


def test_matches_reference_implementation():
    x = np.concatenate([np.linspace(-30, 30, 1201), [-12.0, -11.999, 12.0, 12.001, 0.0]])
    ai, aip = airy_ai(x)
    ref_ai, ref_aip, _, _ = airy(x)
    assert np.max(np.abs(ai - ref_ai)) < 1e-12
    assert np.max(np.abs(aip - ref_aip)) < 1e-11


def test_values_at_zero():
    ai, aip = airy_ai(np.array([0.0]))
    assert ai[0] == pytest.approx(0.3550280538878172, abs=1e-15)
    assert aip[0] == pytest.approx(-0.2588194037928068, abs=1e-15)


def test_differential_equation():
    x = np.linspace(-8, 8, 33)
    h = 1e-4
    _, up = airy_ai(x + h)
    _, dn = airy_ai(x - h)
    ai, _ = airy_ai(x)
    second = (up - dn) / (2 * h)
    assert np.max(np.abs(second - x * ai)) < 1e-7
