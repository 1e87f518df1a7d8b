"""Two-column numeric CSV input shared by the calibration readers."""

from __future__ import annotations

import csv
import io
import math

from .errors import ParseError


def read_columns(text, names):
    """Parse numeric CSV rows, skipping an optional header equal to ``names``.

    Blank lines are ignored. Non-numeric cells raise ``ParseError`` with the
    1-based line number.
    """
    rows = []
    width = len(names)
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(not c for c in cells):
            continue
        if not rows and lineno == 1 and [c.lower() for c in cells] == list(names):
            continue
        if len(cells) != width:
            raise ParseError(f"expected {width} columns {','.join(names)}", line=lineno)
        try:
            values = tuple(float(c) for c in cells)
        except ValueError:
            raise ParseError(f"non-numeric value in {','.join(cells)!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise ParseError("non-finite value", line=lineno)
        rows.append(values)
    return rows
