import enum
import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from nvforge.report import flatten, normalize, render, to_csv, to_json


class Colour(enum.Enum):
    RED = "red"


def test_normalize_types():
    out = normalize({"a": np.float64(1.0 / 3.0), "b": np.int64(3), "c": Colour.RED, "d": (1, None),
                     "e": np.bool_(True), "f": math.nan, "g": -math.inf})
    assert out == {"a": 0.333333333, "b": 3, "c": "red", "d": [1, None], "e": True, "f": None, "g": None}


def test_json_sorted_and_terminated():
    text = to_json({"b": 1, "a": {"d": 2.0, "c": 1.0}})
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": {"c": 1.0, "d": 2.0}, "b": 1}


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_nine_significant_digits(x):
    v = json.loads(to_json({"x": x}))["x"]
    assert v == float(f"{x:.9g}")


def test_deterministic():
    obj = {"z": [1.23456789012, {"y": 2}], "a": "s"}
    assert to_json(obj) == to_json(dict(reversed(list(obj.items()))))


def test_flatten_and_csv():
    assert flatten({"a": {"b": 1, "c": [5, 6]}}) == {"a.b": 1, "a.c.0": 5, "a.c.1": 6}
    text = to_csv([{"a": 1.5, "b": None}, {"c": "x"}])
    assert text.splitlines() == ["a,b,c", "1.5,,", ",,x"]
    assert render({"a": 1}, "csv") == "a\n1\n"
