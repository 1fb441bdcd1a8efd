import json

import numpy as np
import pytest

from adrswr.io import TRACE_HEADER, fmt, read_csv, trace_rows, write_csv, write_json
from adrswr.solver import IterationTrace


@pytest.mark.parametrize("value, text", [
    (0.1, "0.1"), (np.float64(1 / 3), repr(1 / 3)), (3, "3"), (np.int64(7), "7"), (None, ""), ("left", "left"),
])
def test_fmt(value, text):
    assert fmt(value) == text


def test_csv_round_trip_is_exact(tmp_path):
    values = [1 / 3, 2.0**-40, 123456.789, -0.0]
    path = write_csv(tmp_path / "t.csv", ("k", "v"), enumerate(values))
    rows = read_csv(path, ("k", "v"))
    assert [float(r["v"]) for r in rows] == values


def test_csv_header_checked(tmp_path):
    path = write_csv(tmp_path / "t.csv", ("a", "b"), [(1, 2)])
    with pytest.raises(ValueError):
        read_csv(path, ("a", "c"))


def test_json_sorted_and_plain(tmp_path):
    path = write_json(tmp_path / "m.json", {"b": np.float64(0.5), "a": [np.int64(1)]})
    text = path.read_text()
    assert text.endswith("\n") and text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [1], "b": 0.5}


def test_trace_rows_without_reference():
    rows = list(trace_rows(IterationTrace(residuals=[1.0, 0.5])))
    assert rows == [(1, 1.0, None), (2, 0.5, None)]
    assert len(rows[0]) == len(TRACE_HEADER)
