"""Deterministic CSV emission of time series.

ASCII, LF line endings, header ``t,n1,n2,N,duan`` optionally followed by
``r,epsilon``; every value in scientific notation with 15 significant digits.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .timeseries import TimeSeries

BASE_COLUMNS = ("t", "n1", "n2", "N", "duan")
SQUEEZE_COLUMNS = ("r", "epsilon")


def format_value(x: float) -> str:
    """``d.dddddddddddddde<exp>`` with an unpadded, unsigned-if-positive exponent."""
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    mant, exp = f"{x:.14e}".split("e")
    return f"{mant}e{int(exp)}"


def write_timeseries_csv(ts: TimeSeries, path) -> Path:
    columns = list(BASE_COLUMNS)
    if all(k in ts.extras for k in SQUEEZE_COLUMNS):
        columns += SQUEEZE_COLUMNS
    data = [ts.t, ts.n1, ts.n2, ts.N, ts.duan] + [ts.extras[k] for k in columns[5:]]
    lines = [",".join(columns)]
    for row in zip(*(np.asarray(col, dtype=float) for col in data)):
        lines.append(",".join(format_value(v) for v in row))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_timeseries_csv(path) -> dict[str, np.ndarray]:
    """Column name -> values, in file order."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    table = np.array(rows, dtype=float).reshape(-1, len(header))
    return {name: table[:, i] for i, name in enumerate(header)}
