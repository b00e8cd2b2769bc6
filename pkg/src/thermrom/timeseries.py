"""Uniformly sampled temperature series and the CSV exchange format.

CSV layout: UTF-8, comma separated, header ``hour,<label>,...``. The first
column holds decimal hours from dataset start, every other column is one
series. Values are written with shortest round-trip float formatting, so a
write/read cycle reproduces the numbers bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError

# Max deviation between consecutive sample spacings (hours) still
# considered uniform.
UNIFORM_TOL = 1e-9


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A sampled signal: timestamps in hours, values in degrees C."""

    t: np.ndarray
    v: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = _frozen_array(self.t)
        v = _frozen_array(self.v)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        if t.ndim != 1 or v.ndim != 1:
            raise DataError("timestamps and values must be 1-D")
        if t.size != v.size:
            raise DataError(
                f"timestamps and values differ in length ({t.size} vs {v.size})"
            )
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(v)):
            raise DataError("series contains non-finite entries")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise DataError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return int(self.t.size)

    def spacing(self) -> float:
        """Sample spacing in hours. Raises if sampling is not uniform."""
        if len(self) < 2:
            raise DataError("need at least two samples to measure spacing")
        dt = np.diff(self.t)
        if np.max(np.abs(dt - dt[0])) > UNIFORM_TOL:
            name = self.label or "series"
            raise DataError(f"{name} is not uniformly sampled")
        return float(dt[0])

    def with_label(self, label: str) -> "TimeSeries":
        return TimeSeries(self.t, self.v, label)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path, series: Iterable[TimeSeries] | Mapping[str, TimeSeries]) -> None:
    """Write one or more series sharing a common time base.

    Column order follows the input order. Formatting is deterministic:
    the same input always produces byte-identical output.
    """
    if isinstance(series, Mapping):
        cols = list(series.values())
    else:
        cols = list(series)
    if not cols:
        raise DataError("nothing to write")
    labels = [c.label for c in cols]
    if any(not lab for lab in labels):
        raise DataError("every series needs a non-empty label")
    if len(set(labels)) != len(labels):
        raise DataError("duplicate series labels")
    for lab in labels:
        if "," in lab or "\n" in lab:
            raise DataError(f"label {lab!r} contains a reserved character")
    t = cols[0].t
    for c in cols[1:]:
        if not np.array_equal(c.t, t):
            raise DataError(f"series {c.label!r} is not aligned with {labels[0]!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("hour," + ",".join(labels) + "\n")
        for i in range(t.size):
            row = [_fmt(t[i])] + [_fmt(c.v[i]) for c in cols]
            fh.write(",".join(row) + "\n")


def read_csv(path) -> dict[str, TimeSeries]:
    """Parse a dataset CSV into a dict keyed by column label.

    Errors (ragged rows, non-numeric cells, non-increasing timestamps)
    name the offending file line.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0] != "hour":
        raise DataError(f"{path}: first header column must be 'hour', got {header[0]!r}")
    labels = header[1:]
    if not labels:
        raise DataError(f"{path}: no data columns")
    if len(set(labels)) != len(labels):
        raise DataError(f"{path}: duplicate column labels")
    n_cols = len(header)
    times: list[float] = []
    values: list[list[float]] = [[] for _ in labels]
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != n_cols:
            raise DataError(
                f"{path}: row {lineno}: expected {n_cols} fields, got {len(cells)}"
            )
        try:
            row = [float(cell) for cell in cells]
        except ValueError:
            raise DataError(f"{path}: row {lineno}: non-numeric cell") from None
        if times and row[0] <= times[-1]:
            raise DataError(
                f"{path}: row {lineno}: timestamp {row[0]} does not increase"
            )
        times.append(row[0])
        for j in range(len(labels)):
            values[j].append(row[j + 1])
    return {
        lab: TimeSeries(times, vals, lab) for lab, vals in zip(labels, values)
    }
