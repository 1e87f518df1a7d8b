"""Deterministic JSON and CSV emission.

Keys are sorted, floats are rounded to 9 significant digits and non-finite
floats become ``null``, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math

import numpy as np

SIG_DIGITS = 9


def _round(x):
    if not math.isfinite(x):
        return None
    if x == 0:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}")


def normalize(obj):
    """Recursively convert ``obj`` into JSON-ready builtins."""
    if hasattr(obj, "to_dict"):
        return normalize(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [normalize(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def to_json(obj):
    return json.dumps(normalize(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def flatten(obj, prefix=""):
    """Nested dict → flat dict with dotted keys; lists are indexed."""
    out = {}
    if isinstance(obj, dict):
        for k in sorted(obj):
            out.update(flatten(obj[k], f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return str(v)


def to_csv(rows):
    """One record or a list of records → CSV with a header of dotted keys.

    Columns are the sorted union of keys over all rows; missing cells are
    left empty.
    """
    rows = normalize(rows)
    if isinstance(rows, dict):
        rows = [rows]
    flat = [flatten(r) for r in rows]
    columns = sorted({k for r in flat for k in r})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in flat:
        writer.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def render(obj, fmt="json"):
    if fmt == "json":
        return to_json(obj)
    if fmt == "csv":
        return to_csv(obj)
    raise ValueError(f"unknown output format {fmt!r}")
