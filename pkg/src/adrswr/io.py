"""CSV/JSON emitters with deterministic formatting (shortest round-trip floats)."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SURFACE_HEADER = ("omega", "sigma", "abs_rho")
TRACE_HEADER = ("iteration", "residual", "error_vs_reference")
SNAPSHOT_HEADER = ("x", "t", "value", "subdomain", "iteration_tag")
ROOTS_HEADER = ("omega", "side", "re_r_minus", "im_r_minus", "re_r_plus", "im_r_plus", "abs_r_minus", "abs_r_plus")


def fmt(value) -> str:
    if isinstance(value, (str, bool)) or value is None:
        return "" if value is None else str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path, header=None) -> list:
    """Rows as dicts; checks the header row when ``header`` is given."""
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if header is not None and tuple(reader.fieldnames or ()) != tuple(header):
            raise ValueError(f"{path}: header {reader.fieldnames} != {list(header)}")
        return list(reader)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")
    return path


def trace_rows(trace):
    errors = trace.errors or [None] * len(trace.residuals)
    for k, (res, err) in enumerate(zip(trace.residuals, errors), start=1):
        yield k, res, err


def snapshot_rows(fields_by_tag, times):
    """``fields_by_tag`` maps an iteration tag to a (left, right) field pair."""
    for tag, pair in fields_by_tag.items():
        for side, fld in zip(("left", "right"), pair):
            for n, t in enumerate(times):
                for x, v in zip(fld.grid.x, fld.values[n]):
                    yield x, t, v, side, tag
