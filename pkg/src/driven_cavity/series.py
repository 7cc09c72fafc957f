"""Sampled scalar observables and their CSV serialization."""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np


@dataclass
class TimeSeries:
    """Real-valued columns sampled on a common time grid."""

    times: np.ndarray
    columns: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.columns = {k: np.asarray(v, dtype=float) for k, v in self.columns.items()}
        for name, col in self.columns.items():
            if col.shape != self.times.shape:
                raise ValueError(f"column {name!r} has shape {col.shape}, times {self.times.shape}")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.times)


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")  # + 0.0 turns -0.0 into 0


def write_series(series: TimeSeries, path, time_label: str = "t") -> None:
    """Write ``series`` as CSV: header row, 17 significant digits, ``\\n`` newlines.

    Refuses non-finite values.
    """
    for name, col in series.columns.items():
        if not np.all(np.isfinite(col)):
            raise ValueError(f"column {name!r} contains non-finite values")
    if not np.all(np.isfinite(series.times)):
        raise ValueError("time column contains non-finite values")
    names = list(series.columns)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([time_label, *names])
        for i, t in enumerate(series.times):
            writer.writerow([_fmt(t), *(_fmt(series.columns[n][i]) for n in names)])


def read_series(path) -> TimeSeries:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return TimeSeries(data[:, 0], {name: data[:, i + 1] for i, name in enumerate(header[1:])})


def write_rows(path, header: list[str], rows: list[list]) -> None:
    """Plain CSV table (used for jump records)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
