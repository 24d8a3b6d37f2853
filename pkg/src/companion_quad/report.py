"""Deterministic JSON reports: sorted keys, 17 significant digits, NaN as null."""

from __future__ import annotations

import json
import math
from importlib import resources

import numpy as np

__all__ = ["SCHEMA_VERSION", "make_report", "dumps", "to_jsonable", "load_schema", "format_real"]

SCHEMA_VERSION = "1.0.0"


def format_real(x: float) -> str:
    """Shortest text that is exactly ``%.17g`` precision, as valid JSON."""
    text = "%.17g" % x
    if "e" not in text and "." not in text and "inf" not in text and "nan" not in text:
        text += ".0"
    return text


def to_jsonable(obj):
    """Convert numpy scalars/arrays, tuples and dataclass-like objects to plain JSON types."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, np.bool_):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return to_jsonable(obj.as_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(obj, out: list, indent: int, level: int):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(end + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj)
        for i, k in enumerate(keys):
            out.append(pad + json.dumps(k) + ": ")
            _emit(obj[k], out, indent, level + 1)
            out.append(",\n" if i + 1 < len(keys) else "\n")
        out.append(end + "}")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialise ``obj`` deterministically; same input, same bytes."""
    out: list = []
    _emit(to_jsonable(obj), out, indent, 0)
    return "".join(out)


def make_report(command: str, inputs: dict, results: dict, warnings=()) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "warnings": list(warnings),
    }


def load_schema(command: str) -> dict:
    """The published JSON schema for ``command``'s report."""
    text = resources.files("companion_quad").joinpath("schemas", f"{command}.schema.json").read_text()
    return json.loads(text)
