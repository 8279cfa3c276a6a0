import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sparse_ar import lasso, scad
from sparse_ar.errors import InvalidInputError


def test_scad_value_examples():
    pen = scad(0.08, 2.1)
    assert pen.value(0.0) == 0.0
    # third branch: phi = 0.2 >= a*lambda = 0.168 -> (a+1) lambda^2 / 2
    assert pen.value(0.2) == pytest.approx(3.1 * 0.0064 / 2.0, abs=1e-15)
    assert pen.value(-0.2) == pen.value(0.2)


def test_scad_value_by_integrating_derivative():
    pen = scad(0.08, 2.1)
    for x in (0.05, 0.12, 0.2, 0.9):
        val, _ = integrate.quad(pen.derivative, 0.0, x, points=[0.08, 0.168], limit=200)
        assert pen.value(x) == pytest.approx(val, abs=1e-10)


def test_lasso_value_and_derivatives():
    pen = lasso(0.02)
    assert pen.value(-0.5) == pytest.approx(0.01, abs=1e-15)
    assert pen.derivative(0.0) == 0.02
    assert pen.derivative(3.7) == 0.02
    assert pen.second_derivative(0.4) == 0.0


def test_scad_derivative_examples():
    pen = scad(0.08, 2.1)
    assert pen.derivative(0.0) == 0.08  # limit at 0+ equals lambda
    assert pen.derivative(1e-300) == 0.08
    assert pen.derivative(0.2) == 0.0  # beyond a*lambda
    pen2 = scad(0.1, 3.0)
    assert pen2.derivative(0.2) == pytest.approx(0.05, abs=1e-15)  # (0.3-0.2)/2
    h = 1e-7
    fd = (pen2.value(0.2 + h) - pen2.value(0.2 - h)) / (2 * h)
    assert pen2.derivative(0.2) == pytest.approx(fd, rel=1e-6)


def test_scad_second_derivative():
    pen = scad(0.08, 2.1)
    assert pen.second_derivative(0.1) == pytest.approx(-1.0 / 1.1, abs=1e-15)
    assert pen.second_derivative(0.04) == 0.0  # linear branch
    assert pen.second_derivative(0.08) == 0.0  # knot: strict inequalities
    assert pen.second_derivative(0.168) == 0.0
    assert pen.second_derivative(0.5) == 0.0


def test_value_and_derivative_continuous_at_knots():
    pen = scad(0.08, 2.1)
    for knot in (0.08, 0.168):
        below = np.nextafter(knot, 0.0)
        above = np.nextafter(knot, 1.0)
        assert abs(pen.value(above) - pen.value(below)) < 1e-14
        assert abs(pen.derivative(above) - pen.derivative(below)) < 1e-14


@given(st.floats(min_value=0.168, max_value=10.0, allow_nan=False))
def test_scad_saturation(phi):
    pen = scad(0.08, 2.1)
    assert pen.value(phi) == (2.1 + 1.0) * 0.08**2 / 2.0


@settings(max_examples=200)
@given(
    st.floats(min_value=0.0, max_value=5.0),
    st.floats(min_value=0.0, max_value=5.0),
    st.floats(min_value=1e-4, max_value=0.5),
    st.floats(min_value=2.0001, max_value=8.0),
)
def test_value_nondecreasing_and_zero_at_zero(u, v, lam, a):
    for pen in (scad(lam, a), lasso(lam)):
        assert pen.value(0.0) == 0.0
        lo, hi = min(u, v), max(u, v)
        assert pen.value(hi) >= pen.value(lo) - 1e-15


def test_max_nonzero_derivative_dichotomy_scad():
    pen = scad(0.08, 2.1)  # a*lambda = 0.168
    # all nonzero coefficients at or beyond a*lambda -> bias vanishes exactly
    assert pen.max_nonzero_derivative([0.2, 0.0, -0.3]) == 0.0
    assert pen.bias_vanishes([0.2, 0.0, -0.3])
    # one nonzero inside (lambda, a*lambda) -> positive derivative
    assert pen.max_nonzero_derivative([0.2, 0.1]) == pytest.approx((0.168 - 0.1) / 1.1)
    assert not pen.bias_vanishes([0.2, 0.1])
    # smaller than lambda -> full lambda slope
    assert pen.max_nonzero_derivative([0.01]) == 0.08
    # no nonzero coefficients at all
    assert pen.max_nonzero_derivative([0.0, 0.0]) == 0.0


def test_max_nonzero_derivative_lasso():
    pen = lasso(0.02)
    assert pen.max_nonzero_derivative([0.5, -1.0]) == 0.02
    assert not pen.bias_vanishes([0.5])
    assert lasso(0.0).bias_vanishes([0.5])


def test_weights_vector():
    pen = scad(0.08, 2.1)
    w = pen.weights(np.array([0.01, -0.1, 0.25]))
    assert w[0] == 0.08
    assert w[1] == pytest.approx((0.168 - 0.1) / 1.1)
    assert w[2] == 0.0


def test_invalid_parameters():
    with pytest.raises(InvalidInputError):
        scad(0.1, 2.0)  # a must exceed 2
    with pytest.raises(InvalidInputError):
        scad(-0.1, 3.0)
    with pytest.raises(InvalidInputError):
        lasso(-1e-9)
    with pytest.raises(InvalidInputError):
        lasso(0.1).derivative(-0.2)
    with pytest.raises(InvalidInputError):
        scad(0.1, 2.5).second_derivative(-1.0)


def test_lambda_zero_is_the_null_penalty():
    for pen in (scad(0.0, 2.1), lasso(0.0)):
        grid = np.linspace(0, 2, 9)
        assert np.all(pen.value(grid) == 0.0)
        assert np.all(pen.derivative(grid) == 0.0)


def test_scad_piecewise_identity_against_reimplementation(rng):
    # independent re-derivation of the three branches, scalar arithmetic only
    lam, a = 0.08, 2.1
    pen = scad(lam, a)

    def reference(u):
        u = abs(u)
        if u <= lam:
            return lam * u
        if u < a * lam:
            return (a * lam * u / (a - 1)) - u**2 / (2 * (a - 1)) - lam**2 / (2 * (a - 1))
        return (a + 1) * lam**2 / 2

    for u in rng.uniform(-0.5, 0.5, size=200):
        assert pen.value(u) == pytest.approx(reference(u), abs=1e-15)
