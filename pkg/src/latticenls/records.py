"""Plain-text result records and CSV field files.

A result record is a ``key = value`` text file with a fixed key order::

    format = latticenls-result/1
    command = solve
    converged = true
    energy = 0.25
    ...
    config = {"command": "solve", ...}

Floats are written with 17 significant digits so they re-read bit-exactly.
``config`` holds the full resolved configuration as one line of JSON.
Solution files are CSV with columns ``vertex_index, x0, ..., value``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

FORMAT = "latticenls-result/1"


def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "none"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def parse_value(text: str):
    t = text.strip()
    if t in ("true", "false"):
        return t == "true"
    if t == "none":
        return None
    if t.startswith("{") or t.startswith("["):
        return json.loads(t)
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t


def write_record(path, items) -> None:
    """Write ``(key, value)`` pairs in the given order."""
    lines = [f"# latticenls result record", f"format = {FORMAT}"]
    for key, value in items:
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key} = {fmt(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_record(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if " = " not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split(" = ", 1)
        out[key.strip()] = parse_value(value)
    if out.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} record")
    return out


def write_field(path, coordinates, values, extra=None) -> None:
    """CSV with one row per vertex: index, coordinates, value, then any extra columns."""
    coordinates = np.asarray(coordinates)
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex_index"] + [f"x{i}" for i in range(coordinates.shape[1])] + ["value"] + list(extra))
        for x in range(len(values)):
            row = [x, *(int(c) for c in coordinates[x]), fmt(float(values[x]))]
            row += [fmt(float(col[x])) for col in extra.values()]
            w.writerow(row)


def read_field(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    idx = np.array([int(r["vertex_index"]) for r in rows])
    vals = np.empty(len(rows))
    vals[idx] = [float(r["value"]) for r in rows]
    return vals


def write_table(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
