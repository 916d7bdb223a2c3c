import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dcurves import jets
from dcurves.jets import Jet

x0s = st.floats(-2, 2, allow_nan=False)


def univariate(x0, order=3):
    return Jet.variable(np.asarray(x0), (order,))


@given(x0s)
def test_sin_exp_composition_derivatives(x0):
    f = jets.sin(jets.exp(univariate(x0)))
    u = math.exp(x0)
    d1 = math.cos(u) * u
    d2 = -math.sin(u) * u * u + math.cos(u) * u
    d3 = -math.cos(u) * u**3 - 3 * math.sin(u) * u**2 + math.cos(u) * u
    for k, d in enumerate((math.sin(u), d1, d2, d3)):
        assert f.derivative(k) == pytest.approx(d, rel=1e-12, abs=1e-12)


@given(x0s, x0s)
def test_product_rule_against_direct_expansion(a, b):
    t = univariate(0.3)
    f = (t * a + 1) * (t * t + b)
    # polynomial (a t + 1)(t^2 + b) = a t^3 + t^2 + a b t + b
    poly = np.polynomial.Polynomial([b, a * b, 1, a])
    for k in range(4):
        assert f.derivative(k) == pytest.approx(poly.deriv(k)(0.3), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("name, fn, x0", [
    ("cosh", math.cosh, 0.4), ("sinh", math.sinh, -0.7), ("tanh", math.tanh, 0.2),
    ("tan", math.tan, 0.3), ("log", math.log, 1.7), ("sqrt", math.sqrt, 2.3), ("cos", math.cos, 1.1),
])
def test_first_derivative_matches_finite_difference(name, fn, x0):
    j = getattr(jets, name)(univariate(x0, 1))
    h = 1e-6
    fd = (fn(x0 + h) - fn(x0 - h)) / (2 * h)
    assert j.value == pytest.approx(fn(x0), rel=1e-14)
    assert j.derivative(1) == pytest.approx(fd, rel=1e-8)


def test_mixed_partials_of_bivariate_jet():
    u = Jet.variable(np.asarray(0.5), (2, 2), 0)
    v = Jet.variable(np.asarray(-0.3), (2, 2), 1)
    f = jets.exp(u * v)
    # d^2/du dv exp(uv) = exp(uv) (1 + uv)
    assert f.coef(1, 1) == pytest.approx(math.exp(-0.15) * (1 - 0.15), rel=1e-13)
    assert f.diff(0).diff(1).value == pytest.approx(math.exp(-0.15) * (1 - 0.15), rel=1e-13)


def test_reciprocal_and_division():
    t = univariate(2.0)
    r = 1 / t
    for k in range(4):
        assert r.derivative(k) == pytest.approx((-1) ** k * math.factorial(k) / 2.0 ** (k + 1), rel=1e-14)
    assert (t / t).derivative(1) == pytest.approx(0, abs=1e-15)


def test_sqrt_abs_of_negative_quantity():
    t = univariate(0.5)
    q = -(t * t) - 1
    s = jets.sqrt_abs(q)
    assert s.value == pytest.approx(math.sqrt(1.25))
    assert s.derivative(1) == pytest.approx(0.5 / math.sqrt(1.25), rel=1e-13)


def test_batch_axes_are_independent():
    t = Jet.variable(np.linspace(0, 1, 7), (3,))
    f = jets.sin(t)
    assert np.allclose(f.derivative(3), -np.cos(np.linspace(0, 1, 7)), atol=1e-14)


def test_from_derivatives_round_trip():
    j = Jet.from_derivatives([1.0, 2.0, 6.0, 24.0])
    assert [j.derivative(k) for k in range(4)] == pytest.approx([1, 2, 6, 24])


def test_truncate_and_diff_reject_bad_orders():
    j = univariate(0.0, 1)
    with pytest.raises(ValueError):
        j.truncate(2)
    with pytest.raises(ValueError):
        j.diff().diff()
