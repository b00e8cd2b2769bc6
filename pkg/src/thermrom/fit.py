"""Coefficient identification from indoor/outdoor temperature series.

The objective is the RMSE-percent mismatch between the measured indoor
series and the model response to the outdoor series. It is minimized with
a bounded Nelder-Mead simplex restarted from several seeded starting
points; the method is derivative-free because every evaluation runs a
simulation. Results are deterministic for a given seed, whether the starts
run serially or on a thread pool.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DataError
from .metrics import rmse_percent_arrays
from .model import RomCoefficients, to_state_space
from .simulate import METHOD_EXACT_ZOH, SimConfig, _simulate_values, default_initial_state
from .timeseries import TimeSeries, UNIFORM_TOL

DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "c1": (1e-3, 10.0),
    "c2": (1e-3, 100.0),
    "c3": (1e-3, 100.0),
    "c4": (-50.0, 50.0),
}

_COEF_NAMES = ("c1", "c2", "c3", "c4")


@dataclass(frozen=True)
class FitOptions:
    """Search configuration for :func:`fit`.

    Starting points are drawn log-uniformly within bounds for c1..c3 and
    uniformly for c4, from per-start PRNG streams derived from ``seed`` so
    that serial and parallel execution agree bit for bit. ``pinned_c4``
    removes c4 from the search and fixes its value.
    """

    bounds: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_BOUNDS)
    )
    pinned_c4: float | None = None
    n_starts: int = 16
    seed: int = 0
    max_evals: int = 2000
    # stall tolerance: a start stops once its simplex's objective spread
    # falls below tol times the best value of its initial simplex
    tol: float = 1e-8

    def __post_init__(self):
        if set(self.bounds) != set(_COEF_NAMES):
            raise DataError(f"bounds must cover exactly {_COEF_NAMES}")
        for name in _COEF_NAMES:
            lo, hi = self.bounds[name]
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise DataError(f"bound for {name} is not a non-empty interval: {(lo, hi)}")
            if name != "c4" and lo <= 0.0:
                raise DataError(f"lower bound for {name} must be positive (log-uniform draws)")
        if self.n_starts < 1:
            raise DataError("n_starts must be at least 1")
        if not (0 <= self.seed < 2**64):
            raise DataError("seed must fit in an unsigned 64-bit integer")
        if self.max_evals < 10:
            raise DataError("max_evals too small to evaluate an initial simplex")
        if not (self.tol > 0.0):
            raise DataError("tol must be positive")
        if self.pinned_c4 is not None:
            lo, hi = self.bounds["c4"]
            if not (lo <= self.pinned_c4 <= hi):
                raise DataError(f"pinned_c4 {self.pinned_c4} lies outside bounds {(lo, hi)}")


@dataclass(frozen=True)
class FitResult:
    coefficients: RomCoefficients
    rmse_percent: float
    n_evals: int
    start_index: int
    converged: bool
    per_start_objectives: tuple[float, ...]


def _check_series(indoor: TimeSeries, outdoor: TimeSeries) -> float:
    if len(indoor) != len(outdoor):
        raise DataError(
            f"indoor and outdoor lengths differ ({len(indoor)} vs {len(outdoor)})"
        )
    if len(indoor) < 3:
        raise DataError("need at least 3 samples to fit or evaluate the model")
    if np.max(np.abs(indoor.t - outdoor.t)) > UNIFORM_TOL:
        raise DataError("indoor and outdoor timestamps are not aligned")
    return indoor.spacing()


def _resolve_cfg(indoor: TimeSeries, spacing: float, cfg: SimConfig | None) -> SimConfig:
    if cfg is None:
        cfg = SimConfig(dt=spacing)
    if cfg.x0 is None or cfg.v0 is None:
        x0, v0 = default_initial_state(indoor)
        cfg = replace(
            cfg,
            x0=x0 if cfg.x0 is None else cfg.x0,
            v0=v0 if cfg.v0 is None else cfg.v0,
        )
    return cfg


def objective(
    c: RomCoefficients,
    indoor: TimeSeries,
    outdoor: TimeSeries,
    cfg: SimConfig | None = None,
) -> float:
    """RMSE-percent of the model response against the indoor series.

    The model is forced with the outdoor series; unless the config pins
    them, the initial temperature is the first indoor sample and the
    initial rate its first finite difference.
    """
    spacing = _check_series(indoor, outdoor)
    cfg = _resolve_cfg(indoor, spacing, cfg)
    sim = _simulate_values(to_state_space(c), outdoor.t, outdoor.v, cfg)
    return rmse_percent_arrays(indoor.v, sim)


class _BudgetExhausted(Exception):
    pass


def _nelder_mead(fun, x0, lo, hi, max_evals, tol):
    """Bounded Nelder-Mead: every candidate is clamped into the box before
    evaluation. Returns (x_best, f_best, n_evals, stalled)."""
    n = x0.size
    n_evals = 0

    def clamp(p):
        return np.minimum(np.maximum(p, lo), hi)

    def ev(p):
        nonlocal n_evals
        if n_evals >= max_evals:
            raise _BudgetExhausted
        n_evals += 1
        return fun(p)

    verts = np.empty((n + 1, n))
    verts[0] = clamp(x0)
    for i in range(n):
        p = verts[0].copy()
        step = 0.05 * (hi[i] - lo[i])
        if step > 0.0:
            cand = p[i] + step
            if cand > hi[i]:
                cand = p[i] - step
            p[i] = min(max(cand, lo[i]), hi[i])
        verts[i + 1] = p

    fvals = np.empty(n + 1)
    stalled = False
    try:
        for i in range(n + 1):
            fvals[i] = ev(verts[i])
        # stall threshold scales with the objective, so rescaling the
        # objective by a positive constant cannot change the search path
        f_ref = float(np.min(fvals))
        threshold = tol * f_ref if f_ref > 0.0 else tol
        while True:
            order = np.argsort(fvals, kind="stable")
            verts = verts[order]
            fvals = fvals[order]
            if fvals[-1] - fvals[0] <= threshold:
                stalled = True
                break
            centroid = verts[:-1].mean(axis=0)
            xr = clamp(centroid + (centroid - verts[-1]))
            fr = ev(xr)
            if fr < fvals[0]:
                xe = clamp(centroid + 2.0 * (centroid - verts[-1]))
                fe = ev(xe)
                if fe < fr:
                    verts[-1], fvals[-1] = xe, fe
                else:
                    verts[-1], fvals[-1] = xr, fr
            elif fr < fvals[-2]:
                verts[-1], fvals[-1] = xr, fr
            else:
                if fr < fvals[-1]:
                    xc = clamp(centroid + 0.5 * (xr - centroid))
                else:
                    xc = clamp(centroid - 0.5 * (centroid - verts[-1]))
                fc = ev(xc)
                if fc < min(fr, fvals[-1]):
                    verts[-1], fvals[-1] = xc, fc
                else:
                    # shrink toward the best vertex
                    for i in range(1, n + 1):
                        verts[i] = clamp(verts[0] + 0.5 * (verts[i] - verts[0]))
                        fvals[i] = ev(verts[i])
    except _BudgetExhausted:
        pass
    best = int(np.argmin(fvals))
    return verts[best].copy(), float(fvals[best]), n_evals, stalled


def _draw_start(rng: np.random.Generator, bounds, pinned_c4) -> np.ndarray:
    vals = []
    for name in ("c1", "c2", "c3"):
        lo, hi = bounds[name]
        vals.append(float(np.exp(rng.uniform(np.log(lo), np.log(hi)))))
    if pinned_c4 is None:
        lo, hi = bounds["c4"]
        vals.append(float(rng.uniform(lo, hi)))
    return np.array(vals)


def fit(
    indoor: TimeSeries,
    outdoor: TimeSeries,
    opts: FitOptions | None = None,
    cfg: SimConfig | None = None,
    n_jobs: int = 1,
    _objective_scale: float = 1.0,
    _eval_hook: Callable[[np.ndarray, float], None] | None = None,
) -> FitResult:
    """Fit the model coefficients to measured data.

    Runs ``opts.n_starts`` independent Nelder-Mead searches and keeps the
    best. ``converged`` reports whether the winning start stalled within
    its evaluation budget; it is False when every start exhausted
    ``opts.max_evals``. ``n_jobs`` > 1 runs starts on a thread pool with
    identical results. The underscored arguments are test instrumentation:
    a positive factor applied to the objective, and a callback receiving
    every evaluated point.
    """
    if opts is None:
        opts = FitOptions()
    spacing = _check_series(indoor, outdoor)
    cfg = _resolve_cfg(indoor, spacing, cfg)
    if np.ptp(indoor.v) == 0.0:
        warnings.warn(
            "indoor series is constant: coefficients are not identifiable "
            "(stiffness/offset trade-off)",
            stacklevel=2,
        )

    pinned = opts.pinned_c4
    u_t, u_v = outdoor.t, outdoor.v
    indoor_v = indoor.v

    def make_coeffs(x: np.ndarray) -> RomCoefficients:
        if pinned is None:
            return RomCoefficients(x[0], x[1], x[2], x[3])
        return RomCoefficients(x[0], x[1], x[2], pinned)

    def fun(x: np.ndarray) -> float:
        c = make_coeffs(x)
        sim = _simulate_values(to_state_space(c), u_t, u_v, cfg)
        val = _objective_scale * rmse_percent_arrays(indoor_v, sim)
        if _eval_hook is not None:
            _eval_hook(x.copy(), val)
        return val

    names = ("c1", "c2", "c3") if pinned is not None else _COEF_NAMES
    lo = np.array([opts.bounds[n][0] for n in names])
    hi = np.array([opts.bounds[n][1] for n in names])
    streams = np.random.SeedSequence(opts.seed).spawn(opts.n_starts)

    def run_start(k: int):
        rng = np.random.default_rng(streams[k])
        x0 = _draw_start(rng, opts.bounds, pinned)
        return _nelder_mead(fun, x0, lo, hi, opts.max_evals, opts.tol)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run_start, range(opts.n_starts)))
    else:
        results = [run_start(k) for k in range(opts.n_starts)]

    objectives = np.array([r[1] for r in results])
    winner = int(np.argmin(objectives))
    x_best, f_best, _, stalled = results[winner]
    return FitResult(
        coefficients=make_coeffs(x_best),
        rmse_percent=f_best / _objective_scale,
        n_evals=sum(r[2] for r in results),
        start_index=winner,
        converged=stalled,
        per_start_objectives=tuple(float(f / _objective_scale) for f in objectives),
    )
