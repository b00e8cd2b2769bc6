"""Second-order linear zone temperature model.

The scalar form is

    c1*x'' + c2*x' + c3*x = u + c4

with x the zone temperature (degrees C), u the outdoor temperature forcing,
and time measured in hours. c1 scales the inertial term (thermal mass),
c2 the damping term (insulation), c3 the restoring term (conduction), and
c4 a constant offset (radiation and other steady gains). The equivalent
first-order system on state (x, x') is companion-form:

    d/dt [x, x'] = [[0, 1], [-c3/c1, -c2/c1]] [x, x'] + [0, 1/c1] u + [0, c4/c1]

Because the forcing gain on u is fixed at one in the scalar form, the
coefficients are fully identified; scaling all of (c1..c4) together changes
the input gain, not the dynamics matrix.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

REGIME_UNDERDAMPED = "underdamped"
REGIME_CRITICAL = "critically_damped"
REGIME_OVERDAMPED = "overdamped"

# |xi - 1| below this classifies as critically damped
CRITICAL_XI_TOL = 1e-9

MODEL_TIME_UNIT = "hour"
MODEL_TEMP_UNIT = "C"
MODEL_CONVENTION = "eq2-appendix"


@dataclass(frozen=True)
class RomCoefficients:
    """Coefficients of the scalar second-order model, per-hour units."""

    c1: float
    c2: float
    c3: float
    c4: float

    def __post_init__(self):
        for name in ("c1", "c2", "c3", "c4"):
            val = float(getattr(self, name))
            object.__setattr__(self, name, val)
            if not math.isfinite(val):
                raise DataError(f"{name} must be finite, got {val!r}")
        if self.c1 <= 0.0:
            raise DataError(f"c1 must be positive (got {self.c1}); the model divides by c1")
        if self.c2 < 0.0:
            raise DataError(f"c2 must be non-negative (got {self.c2})")
        if self.c3 <= 0.0:
            raise DataError(f"c3 must be positive (got {self.c3}); stiffness is singular otherwise")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c1, self.c2, self.c3, self.c4)

    def normalized(self) -> "RomCoefficients":
        """View with c1 divided out (c1 == 1).

        Reporting convenience only: it shares the raw model's dynamics
        matrix but rescales the unit forcing gain from 1/c1 to 1.
        """
        return RomCoefficients(1.0, self.c2 / self.c1, self.c3 / self.c1, self.c4 / self.c1)


@dataclass(frozen=True)
class StateSpaceModel:
    """Companion-form affine system d/dt state = a @ state + b*u + d.

    State is (x, x') with x in degrees C and rates per hour.
    """

    a: np.ndarray
    b: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        d = np.array(self.d, dtype=float)
        if a.shape != (2, 2) or b.shape != (2,) or d.shape != (2,):
            raise DataError("expected a 2x2 matrix and two 2-vectors")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(d))):
            raise DataError("state-space entries must be finite")
        for arr, name in ((a, "a"), (b, "b"), (d, "d")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class ModalParameters:
    """Modal content of the homogeneous dynamics.

    omega_n: undamped natural frequency (1/hour)
    xi: damping ratio
    sigma: real part of the mode (1/hour); midpoint of the pair when both
        roots are real
    omega: damped oscillation frequency (1/hour); 0 unless underdamped
    regime: one of underdamped / critically_damped / overdamped
    eigenvalues: the two roots of c1*s^2 + c2*s + c3 = 0, slowest first
    """

    omega_n: float
    xi: float
    sigma: float
    omega: float
    regime: str
    eigenvalues: tuple[complex, complex]


def to_state_space(c: RomCoefficients) -> StateSpaceModel:
    """Companion-form realization of the scalar model."""
    if c.c1 <= 0.0:
        raise DataError(f"c1 must be positive (got {c.c1})")
    a = np.array([[0.0, 1.0], [-c.c3 / c.c1, -c.c2 / c.c1]])
    b = np.array([0.0, 1.0 / c.c1])
    d = np.array([0.0, c.c4 / c.c1])
    return StateSpaceModel(a, b, d)


def from_state_space(m: StateSpaceModel) -> RomCoefficients:
    """Invert :func:`to_state_space`. Rejects non-companion systems."""
    if m.a[0, 0] != 0.0 or m.a[0, 1] != 1.0:
        raise DataError(
            f"not companion form: first row must be [0, 1], got {m.a[0].tolist()}"
        )
    if m.b[0] != 0.0 or m.d[0] != 0.0:
        raise DataError("not companion form: forcing must enter the rate row only")
    if m.b[1] <= 0.0:
        raise DataError(f"input gain b[1] must be positive, got {m.b[1]}")
    c1 = 1.0 / m.b[1]
    return RomCoefficients(c1, -m.a[1, 1] * c1, -m.a[1, 0] * c1, m.d[1] * c1)


def modal_analysis(c: RomCoefficients) -> ModalParameters:
    """Natural frequency, damping ratio, and characteristic roots.

    The roots solve c1*s^2 + c2*s + c3 = 0; the damping regime follows the
    damping ratio xi = c2 / (2*sqrt(c1*c3)).
    """
    omega_n = math.sqrt(c.c3 / c.c1)
    xi = c.c2 / (2.0 * math.sqrt(c.c1 * c.c3))
    sigma = -c.c2 / (2.0 * c.c1)
    if abs(xi - 1.0) <= CRITICAL_XI_TOL:
        lam = sigma
        return ModalParameters(omega_n, xi, sigma, 0.0, REGIME_CRITICAL, (lam + 0j, lam + 0j))
    if xi < 1.0:
        omega = omega_n * math.sqrt(1.0 - xi * xi)
        lam = complex(sigma, omega)
        return ModalParameters(omega_n, xi, sigma, omega, REGIME_UNDERDAMPED, (lam, lam.conjugate()))
    # overdamped: solve with the numerically stable quadratic form
    disc = math.sqrt(c.c2 * c.c2 - 4.0 * c.c1 * c.c3)
    q = -0.5 * (c.c2 + disc)
    slow, fast = c.c3 / q, q / c.c1
    return ModalParameters(omega_n, xi, sigma, 0.0, REGIME_OVERDAMPED, (slow + 0j, fast + 0j))


def steady_state(c: RomCoefficients, u_const: float) -> float:
    """Equilibrium temperature under constant forcing: (u + c4) / c3."""
    if c.c3 == 0.0:
        raise DataError("c3 is zero: no finite equilibrium")
    return (u_const + c.c4) / c.c3


_MODEL_FIELDS = ("c1", "c2", "c3", "c4", "time_unit", "temp_unit", "convention")


def save_model(c: RomCoefficients, path) -> None:
    """Write the model JSON file."""
    obj = {
        "c1": c.c1,
        "c2": c.c2,
        "c3": c.c3,
        "c4": c.c4,
        "time_unit": MODEL_TIME_UNIT,
        "temp_unit": MODEL_TEMP_UNIT,
        "convention": MODEL_CONVENTION,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_model(path) -> RomCoefficients:
    """Read a model JSON file, checking units and convention."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise DataError(f"{path}: expected a JSON object")
    missing = [k for k in _MODEL_FIELDS if k not in obj]
    if missing:
        raise DataError(f"{path}: missing fields {missing}")
    extra = [k for k in obj if k not in _MODEL_FIELDS]
    if extra:
        raise DataError(f"{path}: unknown fields {extra}")
    for key, want in (
        ("time_unit", MODEL_TIME_UNIT),
        ("temp_unit", MODEL_TEMP_UNIT),
        ("convention", MODEL_CONVENTION),
    ):
        if obj[key] != want:
            raise DataError(f"{path}: {key} must be {want!r}, got {obj[key]!r}")
    try:
        return RomCoefficients(obj["c1"], obj["c2"], obj["c3"], obj["c4"])
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None
