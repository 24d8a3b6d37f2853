import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from companion_quad.report import SCHEMA_VERSION, dumps, format_real, load_schema, make_report, to_jsonable


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_reals_round_trip_exactly(x):
    assert float(format_real(x)) == x
    assert json.loads(dumps({"v": x}))["v"] == x


def test_deterministic_sorted_output():
    a = dumps({"b": 1.0, "a": [1, 2.5, None], "c": {"z": True, "y": "s"}})
    b = dumps({"c": {"y": "s", "z": True}, "a": [1, 2.5, None], "b": 1.0})
    assert a == b
    assert a.index('"a"') < a.index('"b"') < a.index('"c"')


def test_non_finite_and_numpy_values():
    out = json.loads(dumps({"nan": math.nan, "inf": np.inf, "arr": np.arange(3.0), "i": np.int64(4), "f": np.float32(0.5)}))
    assert out == {"nan": None, "inf": None, "arr": [0.0, 1.0, 2.0], "i": 4, "f": 0.5}
    assert to_jsonable((1, 2)) == [1, 2]
    assert dumps([]) == "[]" and dumps({}) == "{}"


def test_seventeen_digits():
    assert format_real(0.1) == "0.10000000000000001"
    assert format_real(2.0) == "2.0"
    assert format_real(1e-20) == "9.9999999999999995e-21"


def test_envelope_and_schemas():
    rep = make_report("sharpness", {"eps": [0.01], "x": 0.25}, {"rows": []}, ["w"])
    assert rep["schema_version"] == SCHEMA_VERSION
    for cmd in ("bounds", "integrate", "verify", "sharpness", "prob", "convergence"):
        schema = load_schema(cmd)
        assert schema["properties"]["command"]["const"] == cmd
