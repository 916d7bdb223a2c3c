import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dcurves.errors import ExpressionError
from dcurves.expr import Expression
from dcurves.jets import Jet


@pytest.mark.parametrize("src, value", [
    ("1 + 2 * 3", 7.0),
    ("(1 + 2) * 3", 9.0),
    ("2 ^ 3 ^ 2", 512.0),
    ("-2 ^ 2", -4.0),
    ("2 ^ -1", 0.5),
    ("8 / 4 / 2", 1.0),
    ("10 - 4 - 3", 3.0),
    ("sqrt(16) + exp(0) + log(1)", 5.0),
    ("2*pi", 2 * math.pi),
    ("1.5e2", 150.0),
])
def test_precedence_and_literals(src, value):
    assert Expression(src, ())() == pytest.approx(value, rel=1e-15)


def test_variables_and_constants():
    e = Expression("r*cos(t) + a", ("t",), {"r": 2.0, "a": 0.5})
    assert e(t=0.0) == pytest.approx(2.5)
    assert np.allclose(e(t=np.array([0.0, math.pi])), [2.5, -1.5])


def test_expression_accepts_jets():
    e = Expression("t^3", ("t",))
    j = e(t=Jet.variable(np.asarray(2.0), (3,)))
    assert [j.derivative(k) for k in range(4)] == pytest.approx([8, 12, 12, 6])


@pytest.mark.parametrize("src", ["", "1 +", "sin 1", "foo(1)", "(1", "1)", "t $ 2", "unknown + 1", "1 2"])
def test_malformed_expressions_raise(src):
    with pytest.raises(ExpressionError):
        Expression(src, ("t",))


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3))
def test_arithmetic_matches_python(a, b, c):
    e = Expression("a*t - b/c + t^2", ("t",), {"a": a, "b": b, "c": c})
    assert e(t=0.7) == pytest.approx(a * 0.7 - b / c + 0.49, rel=1e-12, abs=1e-12)
