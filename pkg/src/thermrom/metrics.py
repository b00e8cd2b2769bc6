"""Error metrics and lag analysis between temperature series."""
from __future__ import annotations

import numpy as np

from .errors import DataError
from .timeseries import TimeSeries, UNIFORM_TOL


def _check_aligned(a: TimeSeries, b: TimeSeries) -> None:
    if len(a) != len(b):
        raise DataError(f"series lengths differ ({len(a)} vs {len(b)})")
    if len(a) == 0:
        raise DataError("empty series")
    if np.max(np.abs(a.t - b.t)) > UNIFORM_TOL:
        raise DataError("series timestamps are not aligned")


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return float(np.sqrt(np.mean(d * d)))


def rmse_percent_arrays(actual: np.ndarray, model: np.ndarray) -> float:
    """RMSE normalized by the mean of ``actual``, as a percentage.

    Array-level core of :func:`rmse_percent`; used on hot paths where the
    series are already known to be aligned.
    """
    mean = float(np.mean(actual))
    if mean == 0.0:
        raise DataError(
            "mean of the actual series is zero; use rmse_percent_range instead"
        )
    return 100.0 * _rmse(actual, model) / mean


def rmse_percent(actual: TimeSeries, model: TimeSeries) -> float:
    """100 * RMSE(actual, model) / mean(actual).

    Not symmetric: the denominator comes from ``actual`` alone.
    """
    _check_aligned(actual, model)
    return rmse_percent_arrays(actual.v, model.v)


def rmse_percent_range(actual: TimeSeries, model: TimeSeries) -> float:
    """100 * RMSE(actual, model) / (max(actual) - min(actual)).

    Shift-invariant alternative normalization for signals whose mean is
    near zero.
    """
    _check_aligned(actual, model)
    span = float(np.max(actual.v) - np.min(actual.v))
    if span == 0.0:
        raise DataError("actual series is constant; range normalization undefined")
    return 100.0 * _rmse(actual.v, model.v) / span


def peak_lag(a: TimeSeries, b: TimeSeries, max_lag: int) -> int:
    """Signed sample lag that maximizes normalized cross-correlation.

    Sign convention: a positive result k means ``b`` trails ``a`` by k
    samples, i.e. ``b`` looks like ``a`` shifted right by k. Both series
    have their global mean removed; at each candidate lag the overlapping
    segments are correlated and normalized by their norms. Ties are broken
    toward the smallest |k|, then toward negative k.
    """
    _check_aligned(a, b)
    if max_lag < 0:
        raise DataError("max_lag must be non-negative")
    n = len(a)
    if n <= 2 * max_lag:
        raise DataError(f"series too short ({n} samples) for max_lag={max_lag}")
    x = a.v - np.mean(a.v)
    y = b.v - np.mean(b.v)
    if not np.any(x) or not np.any(y):
        raise DataError("constant series: peak lag undefined")
    best_k = None
    best_r = -np.inf
    # preference order implements the tie-breaking rule
    for k in sorted(range(-max_lag, max_lag + 1), key=lambda k: (abs(k), k)):
        if k >= 0:
            xs, ys = x[: n - k], y[k:]
        else:
            xs, ys = x[-k:], y[: n + k]
        denom = float(np.linalg.norm(xs) * np.linalg.norm(ys))
        if denom == 0.0:
            continue
        r = float(np.dot(xs, ys)) / denom
        if r > best_r:
            best_r, best_k = r, k
    if best_k is None:
        raise DataError("correlation undefined at every lag")
    return best_k
