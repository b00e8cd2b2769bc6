"""Forward simulation of the zone model under sampled forcing.

The forcing series is held constant over each sample interval (zero-order
hold). Two integrators are available: ``exact_zoh`` advances the affine
system with the closed-form matrix exponential of the 2x2 dynamics, and
``rk4`` is the classical fourth-order Runge-Kutta scheme on the same ODE,
useful as an independent cross-check and for sub-sample stepping.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .model import StateSpaceModel
from .timeseries import TimeSeries, UNIFORM_TOL

METHOD_EXACT_ZOH = "exact_zoh"
METHOD_RK4 = "rk4"
_METHODS = (METHOD_EXACT_ZOH, METHOD_RK4)

# Eigenvalue gap below this (relative) switches the exponential to the
# confluent form, avoiding catastrophic cancellation between near-equal
# modes.
REPEATED_EIG_TOL = 1e-7

# |z| below this evaluates the phi functions by series instead of the
# cancellation-prone closed forms.
_SMALL_Z = 1e-4


@dataclass(frozen=True)
class SimConfig:
    """Integrator settings and initial state.

    dt is the integrator step in hours. For ``exact_zoh`` it must equal the
    forcing sample spacing; for ``rk4`` the spacing must be an integer
    multiple of dt (substeps). x0/v0 default to rest (0, 0) when left None;
    the fitting layer replaces None with values derived from data.
    """

    dt: float
    method: str = METHOD_EXACT_ZOH
    x0: float | None = None
    v0: float | None = None

    def __post_init__(self):
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise DataError(f"dt must be a positive number of hours, got {self.dt}")
        if self.method not in _METHODS:
            raise DataError(f"method must be one of {_METHODS}, got {self.method!r}")


def _exp1(z: complex) -> complex:
    """(e^z - 1) / z, series-evaluated near zero."""
    if abs(z) < _SMALL_Z:
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0))
    return (cmath.exp(z) - 1.0) / z


def _exp2(z: complex) -> complex:
    """integral_0^1 s*e^(z*s) ds = ((z-1)e^z + 1) / z^2, series near zero."""
    if abs(z) < _SMALL_Z:
        return 0.5 + z * (1.0 / 3.0 + z * (0.125 + z / 30.0))
    return ((z - 1.0) * cmath.exp(z) + 1.0) / (z * z)


def step_matrix(m: StateSpaceModel, dt: float):
    """Exact one-step update for piecewise-constant forcing.

    Returns (Ad, Bd, Dd) with state_{k+1} = Ad @ state_k + Bd * u_k + Dd.
    Ad = exp(A*dt) and Bd, Dd integrate the forcing columns over the step.
    Built from the eigen-structure of the 2x2 matrix, with a confluent
    fallback when the eigenvalues nearly coincide.
    """
    if not (dt > 0.0 and np.isfinite(dt)):
        raise DataError(f"dt must be a positive number of hours, got {dt}")
    a11, a12 = float(m.a[0, 0]), float(m.a[0, 1])
    a21, a22 = float(m.a[1, 0]), float(m.a[1, 1])
    tr = a11 + a22
    det = a11 * a22 - a12 * a21
    disc = cmath.sqrt(complex(tr * tr - 4.0 * det, 0.0))
    lam1 = 0.5 * (tr + disc)
    lam2 = 0.5 * (tr - disc)

    ident = np.eye(2)
    a = np.array([[a11, a12], [a21, a22]])
    if abs(lam1 - lam2) < REPEATED_EIG_TOL * max(1.0, abs(lam1)):
        # confluent form: exp(A t) = e^(lam t) (I + t N), N = A - lam I
        lam = 0.5 * tr
        nmat = a - lam * ident
        z = lam * dt
        ad = cmath.exp(z).real * (ident + dt * nmat)
        psi = dt * (_exp1(z).real * ident + dt * _exp2(z).real * nmat)
    else:
        # spectral projectors P1 + P2 = I, A = lam1 P1 + lam2 P2
        p1 = (a - lam2 * ident) / (lam1 - lam2)
        p2 = ident - p1
        e1, e2 = cmath.exp(lam1 * dt), cmath.exp(lam2 * dt)
        ad = (e1 * p1 + e2 * p2).real
        psi = dt * (_exp1(lam1 * dt) * p1 + _exp1(lam2 * dt) * p2).real
    bd = psi @ m.b
    dd = psi @ m.d
    return ad, bd, dd


def default_initial_state(indoor: TimeSeries) -> tuple[float, float]:
    """Initial (x0, v0) estimated from the first two indoor samples."""
    if len(indoor) < 2:
        raise DataError("need at least two indoor samples to estimate the initial rate")
    dt = indoor.spacing()
    x0 = float(indoor.v[0])
    v0 = (float(indoor.v[1]) - x0) / dt
    return x0, v0


def _simulate_values(
    m: StateSpaceModel, u_t: np.ndarray, u_v: np.ndarray, cfg: SimConfig
) -> np.ndarray:
    n = u_t.size
    x = 0.0 if cfg.x0 is None else float(cfg.x0)
    v = 0.0 if cfg.v0 is None else float(cfg.v0)
    out = np.empty(n)
    out[0] = x
    if n == 1:
        return out
    spacing = float(u_t[1] - u_t[0])
    gaps = np.diff(u_t)
    if np.max(np.abs(gaps - spacing)) > UNIFORM_TOL:
        raise DataError("forcing series is not uniformly sampled")
    uvals = u_v.tolist()

    if cfg.method == METHOD_EXACT_ZOH:
        if abs(spacing - cfg.dt) > UNIFORM_TOL:
            raise DataError(
                f"exact_zoh needs dt equal to the sample spacing ({spacing} h), got {cfg.dt} h"
            )
        ad, bd, dd = step_matrix(m, cfg.dt)
        p11, p12 = float(ad[0, 0]), float(ad[0, 1])
        p21, p22 = float(ad[1, 0]), float(ad[1, 1])
        q1, q2 = float(bd[0]), float(bd[1])
        r1, r2 = float(dd[0]), float(dd[1])
        for k in range(n - 1):
            uk = uvals[k]
            x, v = (
                p11 * x + p12 * v + q1 * uk + r1,
                p21 * x + p22 * v + q2 * uk + r2,
            )
            out[k + 1] = x
        return out

    # rk4: substep each sample interval
    ratio = spacing / cfg.dt
    substeps = int(round(ratio))
    if substeps < 1 or abs(ratio - substeps) > 1e-9 * max(1.0, ratio):
        raise DataError(
            f"rk4 needs the sample spacing ({spacing} h) to be an integer multiple of dt ({cfg.dt} h)"
        )
    h = spacing / substeps
    a11, a12 = float(m.a[0, 0]), float(m.a[0, 1])
    a21, a22 = float(m.a[1, 0]), float(m.a[1, 1])
    b1, b2 = float(m.b[0]), float(m.b[1])
    d1, d2 = float(m.d[0]), float(m.d[1])
    for k in range(n - 1):
        uk = uvals[k]
        g1 = b1 * uk + d1
        g2 = b2 * uk + d2
        for _ in range(substeps):
            k1x = a11 * x + a12 * v + g1
            k1v = a21 * x + a22 * v + g2
            x2 = x + 0.5 * h * k1x
            v2 = v + 0.5 * h * k1v
            k2x = a11 * x2 + a12 * v2 + g1
            k2v = a21 * x2 + a22 * v2 + g2
            x3 = x + 0.5 * h * k2x
            v3 = v + 0.5 * h * k2v
            k3x = a11 * x3 + a12 * v3 + g1
            k3v = a21 * x3 + a22 * v3 + g2
            x4 = x + h * k3x
            v4 = v + h * k3v
            k4x = a11 * x4 + a12 * v4 + g1
            k4v = a21 * x4 + a22 * v4 + g2
            x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
            v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        out[k + 1] = x
    return out


def simulate(m: StateSpaceModel, u: TimeSeries, cfg: SimConfig) -> TimeSeries:
    """Indoor temperature response to the forcing series ``u``.

    The output shares the forcing timestamps; sample k+1 is the state after
    integrating over [t_k, t_{k+1}) with u held at u_k.
    """
    if len(u) == 0:
        raise DataError("empty forcing series")
    values = _simulate_values(m, u.t, u.v, cfg)
    return TimeSeries(u.t, values, "t_in")
