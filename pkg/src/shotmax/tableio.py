"""CSV/JSON table output and CSV path input.

CSV layout::

    # schema_version=1
    # command=psi
    # ...more key=value metadata...
    x,psi_hat,std_error,replicates,grid_points
    0.5,0.079928757137894371,...

Reals are written with 17 significant digits and ``.`` as decimal separator;
list-valued cells are joined with ``;``.  JSON output is a single object
``{"meta": {...}, "rows": [...]}`` validated by :data:`TABLE_SCHEMA`.
"""

from __future__ import annotations

import io
import json
import math
from typing import Iterable

import numpy as np

from shotmax.fbm import GridPath

SCHEMA_VERSION = 1

TABLE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["meta", "rows"],
    "additionalProperties": False,
    "properties": {
        "meta": {
            "type": "object",
            "required": ["schema_version", "command"],
            "properties": {
                "schema_version": {"const": SCHEMA_VERSION},
                "command": {"type": "string"},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": {
                    "type": ["number", "integer", "string", "array", "null"],
                },
            },
        },
    },
}


def format_real(v: float) -> str:
    return format(float(v), ".17g")


def _cell(v) -> str:
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(_cell(e) for e in v)
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_real(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(e) for e in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def to_csv(rows: list[dict], meta: dict) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={_cell(value)}\n")
    if rows:
        columns = list(rows[0])
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_cell(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def to_json(rows: list[dict], meta: dict) -> str:
    doc = {
        "meta": {k: _jsonable(v) for k, v in meta.items()},
        "rows": [{k: _jsonable(v) for k, v in row.items()} for row in rows],
    }
    return json.dumps(doc, allow_nan=False) + "\n"


def render(rows: list[dict], meta: dict, fmt: str) -> str:
    meta = {"schema_version": SCHEMA_VERSION, **meta}
    if fmt == "csv":
        return to_csv(rows, meta)
    if fmt == "json":
        return to_json(rows, meta)
    raise ValueError(f"unknown output format {fmt!r}")


def path_rows(path: GridPath) -> list[dict]:
    return [{"t": t, "value": v} for t, v in zip(path.times.tolist(), path.values.tolist())]


def parse_csv(text: str) -> tuple[dict, list[str], list[list[str]]]:
    meta, header, rows = {}, None, []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    if header is None:
        raise ValueError("CSV has no header row")
    return meta, header, rows


def read_path_csv(lines: Iterable[str] | str) -> GridPath:
    """Read a ``t,value`` path table as written by ``simulate``."""
    text = lines if isinstance(lines, str) else "".join(lines)
    _, header, rows = parse_csv(text)
    if header[:2] != ["t", "value"]:
        raise ValueError(f"expected columns t,value, got {','.join(header)}")
    t = np.array([float(r[0]) for r in rows])
    v = np.array([float(r[1]) for r in rows])
    n = t.size - 1
    if n < 1 or not np.allclose(t, np.arange(n + 1) / n, rtol=0, atol=1e-12):
        raise ValueError("path times must form the uniform grid j/n, j=0..n")
    return GridPath(v)
