"""CSV ingestion and JSON/CSV report output."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

from .regression import SampleSet

__all__ = [
    "CsvFormatError",
    "load_csv",
    "format_float",
    "curve_csv",
    "parse_curve_csv",
    "table_csv",
    "to_jsonable",
    "dumps_json",
]


class CsvFormatError(ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def load_csv(path) -> SampleSet:
    """Read ``x1,...,xd,y`` columns into a :class:`SampleSet`.

    Errors name the offending line (1-based, header is line 1).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise CsvFormatError(path, 1, "file is empty")
        header = [h.strip() for h in header]
        d = len(header) - 1
        if d < 1:
            raise CsvFormatError(path, 1, "need at least one covariate column and a response column")
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != d + 1:
                raise CsvFormatError(
                    path, reader.line_num, f"expected {d + 1} fields, found {len(row)}"
                )
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise CsvFormatError(path, reader.line_num, f"non-numeric cell in {row!r}") from None
            if not all(math.isfinite(v) for v in values):
                raise CsvFormatError(path, reader.line_num, "non-finite value")
            rows.append(values)
    if len(rows) < 2:
        raise CsvFormatError(path, 1, f"need at least 2 data rows, found {len(rows)}")
    arr = np.array(rows)
    return SampleSet(arr[:, :d], arr[:, d])


def format_float(v):
    return format(float(v), ".17g")


def curve_csv(grid, columns):
    """CSV text with header ``e,<names...>``; ``columns`` maps name to values."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["e", *columns])
    cols = [np.asarray(v) for v in columns.values()]
    for i, e in enumerate(grid):
        w.writerow([format_float(e), *(format_float(c[i]) for c in cols)])
    return buf.getvalue()


def parse_curve_csv(text):
    """Inverse of :func:`curve_csv`: returns ``{column: float array}``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    data = np.array([[float(c) for c in row] for row in reader if row])
    return {name: data[:, j] for j, name in enumerate(header)}


def table_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["e", "estimator", "bias", "variance", "mse"])
    for r in rows:
        w.writerow([format_float(r.e), r.estimator, *map(format_float, (r.bias, r.variance, r.mse))])
    return buf.getvalue()


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
            if f.repr and not f.name.startswith("_")
        }
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return {"value": float(obj), "exact": str(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dumps_json(obj):
    return json.dumps(to_jsonable(obj), indent=2)
