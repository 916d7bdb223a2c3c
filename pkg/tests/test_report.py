import csv
import io
import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from dcurves.dpair import Residual
from dcurves.report import dumps_csv, dumps_json, fmt, ledger_summary

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite)
def test_shortest_repr_round_trips(x):
    assert float(fmt(x)) == x


def test_non_finite_formatting():
    assert fmt(float("nan")) == "nan" and fmt(float("inf")) == "inf"
    assert json.loads(dumps_json({"a": float("nan")})) == {"a": None}


@given(st.lists(finite, min_size=1, max_size=20))
def test_csv_and_json_encode_the_same_numbers(xs):
    cols = {"s": np.arange(len(xs), dtype=float), "value": np.array(xs)}
    rows = list(csv.DictReader(io.StringIO(dumps_csv(cols))))
    from_json = json.loads(dumps_json(cols))
    assert [float(r["value"]) for r in rows] == from_json["value"] == xs


def test_csv_layout():
    text = dumps_csv({"a": [1.0, 2.5], "b": ["x", "y"], "ok": [True, False]})
    assert text == "a,b,ok\n1.0,x,true\n2.5,y,false\n"


def test_json_is_stable():
    obj = {"b": np.array([0.1, 0.2]), "a": {"z": np.float64(1 / 3), "y": np.int64(2)}}
    assert dumps_json(obj) == dumps_json(obj)
    assert list(json.loads(dumps_json(obj))) == ["b", "a"]


def test_ledger_summary_roles_and_conventions():
    one = np.ones(5)
    ledger = {
        "torsion_rate[stated]": Residual("torsion_rate", "stated", one, one),
        "torsion_rate[flipped]": Residual("torsion_rate", "flipped", one, -one),
        "curvature_coupling[stated]": Residual("curvature_coupling", "stated", one, one + 1e-3),
    }
    s = ledger_summary(ledger)
    assert s["conventions"] == {"torsion_rate": "stated"}
    assert s["residuals"]["torsion_rate[flipped]"]["role"] == "candidate"
    assert s["residuals"]["curvature_coupling[stated]"]["role"] == "required"
    assert not s["pass"]
    assert ledger_summary(ledger, tol_override=1e-2)["pass"]


def test_relative_residual_scale():
    r = Residual("x", "y", np.array([100.0, 0.0]), np.array([100.5, 0.0]))
    assert math.isclose(r.abs_max, 0.5) and math.isclose(r.rel_max, 0.5 / 100.5)
    r = Residual("x", "y", np.array([1e-3]), np.array([2e-3]))
    assert math.isclose(r.rel_max, 1e-3)
