"""Nonlinear multi-zone RC-network reference simulator and synthetic weather.

A desk-scale stand-in for whole-building simulation output. Heat moves
between capacitance nodes along conductance edges, exterior surfaces
exchange T^4 radiation with the ambient, and zones receive scheduled solar
gains. Preset parameter values are invented constants chosen for
qualitative realism (heavier constructions get larger wall capacitance,
added insulation lowers conductances); they are not calibrated against any
standard construction tables.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError
from .timeseries import TimeSeries, UNIFORM_TOL

AMBIENT = "AMBIENT"
STEFAN_BOLTZMANN = 5.670374419e-8  # W/(m^2 K^4)
KELVIN_OFFSET = 273.15
SECONDS_PER_HOUR = 3600.0

# integration aborts when any node leaves this envelope
TEMP_LIMIT_C = 200.0

PRESET_NAMES = (
    "standard",
    "brick",
    "brick_insulation",
    "brick_insulation_concrete",
    "multizone4",
)

WEATHER_PROFILES = ("mild_coastal", "hot_inland")


@dataclass(frozen=True)
class ZoneNode:
    name: str
    capacitance: float  # J/K
    initial_temp: float  # degrees C
    volume: float = 1.0  # m^3, used for zone-weighted aggregation
    is_zone_air: bool = False


@dataclass(frozen=True)
class Conduction:
    node_a: str
    node_b: str  # node name or AMBIENT
    conductance: float  # W/K


@dataclass(frozen=True)
class RadiationSurface:
    """Exterior surface exchanging long-wave radiation with the ambient."""

    node: str
    emissivity: float
    area: float  # m^2 effective


@dataclass(frozen=True)
class SolarAperture:
    """Scheduled solar gain into a node.

    ``gain`` converts irradiance (W/m^2) to heat (W). ``phase_hours``
    shifts the irradiance schedule by whole hours as an orientation proxy
    (negative: peaks earlier in the day).
    """

    node: str
    gain: float
    phase_hours: int = 0


@dataclass(frozen=True)
class ZoneNetwork:
    nodes: tuple[ZoneNode, ...]
    edges: tuple[Conduction, ...]
    radiation: tuple[RadiationSurface, ...] = ()
    solar: tuple[SolarAperture, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "radiation", tuple(self.radiation))
        object.__setattr__(self, "solar", tuple(self.solar))
        names = [n.name for n in self.nodes]
        if len(set(names)) != len(names):
            raise DataError("duplicate node names")
        if AMBIENT in names:
            raise DataError(f"{AMBIENT} is reserved for the boundary")
        for n in self.nodes:
            if not n.capacitance > 0.0:
                raise DataError(f"node {n.name!r}: capacitance must be positive")
            if not n.volume > 0.0:
                raise DataError(f"node {n.name!r}: volume must be positive")
        if not any(n.is_zone_air for n in self.nodes):
            raise DataError("network needs at least one zone-air node")
        known = set(names)
        for e in self.edges:
            if e.conductance < 0.0:
                raise DataError(f"edge {e.node_a}-{e.node_b}: conductance must be >= 0")
            for end in (e.node_a, e.node_b):
                if end != AMBIENT and end not in known:
                    raise DataError(f"edge references unknown node {end!r}")
            if e.node_a == e.node_b:
                raise DataError(f"edge {e.node_a}-{e.node_b} is a self-loop")
        for r in self.radiation:
            if r.node not in known:
                raise DataError(f"radiation references unknown node {r.node!r}")
            if not 0.0 <= r.emissivity <= 1.0:
                raise DataError(f"radiation on {r.node!r}: emissivity must be in [0, 1]")
            if r.area < 0.0:
                raise DataError(f"radiation on {r.node!r}: area must be >= 0")
        for s in self.solar:
            if s.node not in known:
                raise DataError(f"solar gain references unknown node {s.node!r}")
            if s.gain < 0.0:
                raise DataError(f"solar gain on {s.node!r} must be >= 0")

    def zone_nodes(self) -> tuple[ZoneNode, ...]:
        return tuple(n for n in self.nodes if n.is_zone_air)


@dataclass(frozen=True)
class WeatherSeries:
    """Hourly outdoor forcing: temperature (degrees C) and irradiance (W/m^2)."""

    timestamps: np.ndarray
    outdoor_temp: np.ndarray
    solar_irradiance: np.ndarray

    def __post_init__(self):
        t = np.array(self.timestamps, dtype=float)
        temp = np.array(self.outdoor_temp, dtype=float)
        irr = np.array(self.solar_irradiance, dtype=float)
        if not (t.ndim == temp.ndim == irr.ndim == 1) or not (t.size == temp.size == irr.size):
            raise DataError("weather arrays must be 1-D and equally long")
        if t.size < 2:
            raise DataError("weather needs at least two samples")
        gaps = np.diff(t)
        if np.max(np.abs(gaps - 1.0)) > UNIFORM_TOL:
            raise DataError("weather must be sampled hourly")
        if not (np.all(np.isfinite(temp)) and np.all(np.isfinite(irr))):
            raise DataError("weather contains non-finite entries")
        if np.any(irr < 0.0):
            raise DataError("irradiance must be non-negative")
        for arr, name in ((t, "timestamps"), (temp, "outdoor_temp"), (irr, "solar_irradiance")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def outdoor_series(self) -> TimeSeries:
        return TimeSeries(self.timestamps, self.outdoor_temp, "t_out")


_PROFILE_PARAMS = {
    # mean C, daily amplitude C, drift C/day, peak irradiance W/m^2
    "mild_coastal": (14.0, 5.0, 0.08, 820.0),
    "hot_inland": (26.0, 9.0, 0.15, 950.0),
}


def synth_weather(
    days: int,
    seed: int,
    profile: str = "mild_coastal",
    noise_sigma: float = 0.8,
) -> WeatherSeries:
    """Deterministic synthetic weather: one sample per hour.

    Outdoor temperature is a daily sinusoid peaking at 15:00 plus a slow
    per-day drift and seeded AR(1) noise with stationary deviation
    ``noise_sigma``. Irradiance is a clipped half-sinusoid between 06:00
    and 18:00. Identical arguments always yield identical arrays.
    """
    if days < 1:
        raise DataError("days must be at least 1")
    if profile not in _PROFILE_PARAMS:
        raise DataError(f"unknown weather profile {profile!r}; choose from {WEATHER_PROFILES}")
    if noise_sigma < 0.0:
        raise DataError("noise_sigma must be >= 0")
    mean, amplitude, drift_per_day, peak_irr = _PROFILE_PARAMS[profile]
    n = 24 * days
    t = np.arange(n, dtype=float)
    hour_of_day = t % 24.0
    day = np.floor(t / 24.0)
    # peak at 15:00: sin is maximal when (h - 9) = 6
    temp = mean + amplitude * np.sin(2.0 * np.pi * (hour_of_day - 9.0) / 24.0)
    temp = temp + drift_per_day * day
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        rho = 0.9
        innovations = rng.normal(0.0, noise_sigma * np.sqrt(1.0 - rho * rho), size=n)
        noise = np.empty(n)
        noise[0] = rng.normal(0.0, noise_sigma)
        for k in range(1, n):
            noise[k] = rho * noise[k - 1] + innovations[k]
        temp = temp + noise
    irradiance = peak_irr * np.clip(np.sin(np.pi * (hour_of_day - 6.0) / 12.0), 0.0, None)
    return WeatherSeries(t, temp, irradiance)


def simulate_network(
    net: ZoneNetwork, w: WeatherSeries, substeps: int = 60
) -> dict[str, TimeSeries]:
    """Integrate the network over the weather horizon.

    Weather is held constant over each hour; within an hour the node
    energy balance is integrated with classical RK4 using ``substeps``
    stages per hour. Returns the hourly zone-air temperatures keyed by
    node name.
    """
    if substeps < 1:
        raise DataError("substeps must be at least 1")
    names = [n.name for n in net.nodes]
    index = {name: i for i, name in enumerate(names)}
    nn = len(names)

    cap = np.array([n.capacitance for n in net.nodes])
    temps = np.array([n.initial_temp for n in net.nodes])

    # symmetric conductance matrix between nodes + ambient coupling vector
    kmat = np.zeros((nn, nn))
    kamb = np.zeros(nn)
    for e in net.edges:
        if e.node_b == AMBIENT:
            kamb[index[e.node_a]] += e.conductance
        elif e.node_a == AMBIENT:
            kamb[index[e.node_b]] += e.conductance
        else:
            i, j = index[e.node_a], index[e.node_b]
            kmat[i, j] += e.conductance
            kmat[j, i] += e.conductance
    krow = kmat.sum(axis=1)

    rad_coef = np.zeros(nn)  # emissivity * area * sigma
    for r in net.radiation:
        rad_coef[index[r.node]] += r.emissivity * r.area * STEFAN_BOLTZMANN

    sol_gain = np.zeros(nn)
    sol_phase = np.zeros(nn, dtype=int)
    for s in net.solar:
        sol_gain[index[s.node]] += s.gain
        sol_phase[index[s.node]] = s.phase_hours

    n_hours = len(w)
    out = np.empty((nn, n_hours))
    out[:, 0] = temps
    h = SECONDS_PER_HOUR / substeps
    irr = w.solar_irradiance

    def derivative(T, t_amb, solar_heat):
        flux = kmat @ T - krow * T + kamb * (t_amb - T)
        if rad_coef.any():
            tk = T + KELVIN_OFFSET
            ak = t_amb + KELVIN_OFFSET
            flux = flux + rad_coef * (ak**4 - tk**4)
        return (flux + solar_heat) / cap

    for k in range(n_hours - 1):
        t_amb = float(w.outdoor_temp[k])
        shifted = np.clip(k - sol_phase, 0, n_hours - 1)
        solar_heat = sol_gain * irr[shifted]
        for _ in range(substeps):
            k1 = derivative(temps, t_amb, solar_heat)
            k2 = derivative(temps + 0.5 * h * k1, t_amb, solar_heat)
            k3 = derivative(temps + 0.5 * h * k2, t_amb, solar_heat)
            k4 = derivative(temps + h * k3, t_amb, solar_heat)
            temps = temps + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.max(np.abs(temps)) > TEMP_LIMIT_C:
            worst = names[int(np.argmax(np.abs(temps)))]
            raise DataError(
                f"network simulation unstable at hour {k + 1}: node {worst!r} "
                f"passed {TEMP_LIMIT_C:.0f} C; raise substeps or check parameters"
            )
        out[:, k + 1] = temps

    return {
        n.name: TimeSeries(w.timestamps, out[index[n.name]], n.name)
        for n in net.zone_nodes()
    }


def aggregate_zones(zones: Sequence[TimeSeries], volumes: Sequence[float]) -> TimeSeries:
    """Pointwise volume-weighted mean of zone temperatures."""
    zones = list(zones)
    if not zones:
        raise DataError("no zones to aggregate")
    if len(zones) != len(volumes):
        raise DataError(f"{len(zones)} zones but {len(volumes)} volumes")
    vols = np.array(volumes, dtype=float)
    if np.any(vols <= 0.0):
        raise DataError("volumes must be positive")
    t = zones[0].t
    for z in zones[1:]:
        if len(z) != len(zones[0]) or np.max(np.abs(z.t - t)) > UNIFORM_TOL:
            raise DataError(f"zone {z.label!r} is not aligned with {zones[0].label!r}")
    stacked = np.stack([z.v for z in zones])
    weighted = (vols[:, None] * stacked).sum(axis=0) / vols.sum()
    return TimeSeries(t, weighted, "t_in_agg")


def _single_zone_network(
    wall_capacitance: float,
    k_zone_wall: float,
    k_wall_ambient: float,
    k_zone_ambient: float,
    solar_gain: float,
) -> ZoneNetwork:
    # zone node lumps air plus light interior mass; volume matches a small
    # single-zone residential space
    zone = ZoneNode("t_in", capacitance=2.0e6, initial_temp=15.0, volume=181.5, is_zone_air=True)
    wall = ZoneNode("wall", capacitance=wall_capacitance, initial_temp=14.0, volume=12.0)
    return ZoneNetwork(
        nodes=(zone, wall),
        edges=(
            Conduction("t_in", "wall", k_zone_wall),
            Conduction("wall", AMBIENT, k_wall_ambient),
            Conduction("t_in", AMBIENT, k_zone_ambient),
        ),
        radiation=(RadiationSurface("wall", emissivity=0.85, area=8.0),),
        solar=(SolarAperture("t_in", gain=solar_gain, phase_hours=0),),
    )


# Single-zone construction variants. Constants are not calibrated; only the
# orderings matter: heavier walls carry more capacitance, added insulation
# lowers both wall conductances.
_SINGLE_ZONE_PRESETS = {
    "standard": dict(
        wall_capacitance=9.0e6,
        k_zone_wall=320.0,
        k_wall_ambient=160.0,
        k_zone_ambient=55.0,
        solar_gain=3.0,
    ),
    "brick": dict(
        wall_capacitance=3.6e7,
        k_zone_wall=260.0,
        k_wall_ambient=120.0,
        k_zone_ambient=45.0,
        solar_gain=2.6,
    ),
    "brick_insulation": dict(
        wall_capacitance=3.6e7,
        k_zone_wall=130.0,
        k_wall_ambient=48.0,
        k_zone_ambient=32.0,
        solar_gain=2.3,
    ),
    "brick_insulation_concrete": dict(
        wall_capacitance=8.5e7,
        k_zone_wall=115.0,
        k_wall_ambient=40.0,
        k_zone_ambient=28.0,
        solar_gain=2.1,
    ),
}


def _multizone4_network() -> ZoneNetwork:
    # four zones with distinct volumes and orientations, ring-coupled
    specs = [
        # name, volume, wall_cap, k_zw, k_wa, k_za, solar gain, phase
        ("zone1", 181.5, 1.6e7, 300.0, 140.0, 50.0, 2.5, 0),
        ("zone2", 120.0, 1.2e7, 260.0, 110.0, 40.0, 1.8, -3),
        ("zone3", 150.0, 2.4e7, 240.0, 90.0, 35.0, 2.2, 3),
        ("zone4", 95.0, 0.9e7, 280.0, 130.0, 30.0, 1.2, 0),
    ]
    nodes = []
    edges = []
    radiation = []
    solar = []
    for name, vol, wall_cap, k_zw, k_wa, k_za, gain, phase in specs:
        wall = f"{name}_wall"
        nodes.append(
            ZoneNode(name, capacitance=1.1e4 * vol, initial_temp=15.0, volume=vol, is_zone_air=True)
        )
        nodes.append(ZoneNode(wall, capacitance=wall_cap, initial_temp=14.0, volume=8.0))
        edges.append(Conduction(name, wall, k_zw))
        edges.append(Conduction(wall, AMBIENT, k_wa))
        edges.append(Conduction(name, AMBIENT, k_za))
        radiation.append(RadiationSurface(wall, emissivity=0.85, area=6.0))
        solar.append(SolarAperture(name, gain=gain, phase_hours=phase))
    ring = [("zone1", "zone2"), ("zone2", "zone3"), ("zone3", "zone4"), ("zone4", "zone1")]
    for a, b in ring:
        edges.append(Conduction(a, b, 90.0))
    return ZoneNetwork(tuple(nodes), tuple(edges), tuple(radiation), tuple(solar))


def preset(name: str) -> ZoneNetwork:
    """A ready-made network for one of the named construction scenarios."""
    if name in _SINGLE_ZONE_PRESETS:
        return _single_zone_network(**_SINGLE_ZONE_PRESETS[name])
    if name == "multizone4":
        return _multizone4_network()
    raise DataError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
