"""
Circular-orbit geometry for a Walker-delta constellation and one ground station.

All positions are expressed in an Earth-centred inertial frame whose x axis
points at Greenwich at t = 0.  Orbits are Keplerian and circular (no J2, no
drag); the Earth is a sphere rotating at a constant rate.

Epoch convention: at t = 0 satellite (orbit 0, slot 0) sits on the ascending
node of a plane with right ascension 0, and the ground station sits at its
configured geographic longitude.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    gm: float = 3.986004418e14            # m^3/s^2
    earth_radius: float = 6_371_000.0     # m
    earth_rotation_rate: float = 7.2921159e-5  # rad/s
    light_speed: float = 299_792_458.0    # m/s
    boltzmann: float = 1.380649e-23       # J/K

    def __post_init__(self) -> None:
        for name in ("gm", "earth_radius", "earth_rotation_rate", "light_speed", "boltzmann"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"PhysicalConstants.{name} must be strictly positive, got {value!r}")


EARTH = PhysicalConstants()


@dataclass(frozen=True)
class ConstellationSpec:
    """Walker-delta geometry.

    ``altitudes`` and ``inclinations`` hold one entry per orbit.  Plane ``l``
    has right ascension ``raan_spread * l / num_orbits`` and its slot 0 is
    advanced by ``l * phasing_offset`` along track.
    """

    num_orbits: int
    sats_per_orbit: int
    altitudes: tuple[float, ...]
    inclinations: tuple[float, ...]
    raan_spread: float = math.pi
    phasing_offset: float = 0.0

    def __post_init__(self) -> None:
        if self.num_orbits < 1:
            raise ValueError(f"num_orbits must be >= 1 (L >= 1), got {self.num_orbits}")
        if self.sats_per_orbit < 1:
            raise ValueError(f"sats_per_orbit must be >= 1 (K >= 1), got {self.sats_per_orbit}")
        object.__setattr__(self, "altitudes", tuple(float(h) for h in self.altitudes))
        object.__setattr__(self, "inclinations", tuple(float(a) for a in self.inclinations))
        if len(self.altitudes) != self.num_orbits or len(self.inclinations) != self.num_orbits:
            raise ValueError("altitudes and inclinations need exactly one entry per orbit")
        for h in self.altitudes:
            if not h > 0:
                raise ValueError(f"altitude must be > 0 m, got {h}")
        for a in self.inclinations:
            if not 0.0 <= a <= math.pi / 2:
                raise ValueError(f"inclination must lie in [0, pi/2] rad, got {a}")

    @classmethod
    def walker_delta(
        cls,
        num_orbits: int,
        sats_per_orbit: int,
        altitude: float,
        inclination: float,
        raan_spread: float = math.pi,
        phasing_factor: int = 1,
    ) -> "ConstellationSpec":
        """Uniform constellation; inter-plane offset is 2*pi*F / (L*K)."""
        total = num_orbits * sats_per_orbit
        offset = 2 * math.pi * phasing_factor / total if total > 0 else 0.0
        return cls(
            num_orbits=num_orbits,
            sats_per_orbit=sats_per_orbit,
            altitudes=(altitude,) * max(num_orbits, 0),
            inclinations=(inclination,) * max(num_orbits, 0),
            raan_spread=raan_spread,
            phasing_offset=offset,
        )

    @property
    def num_satellites(self) -> int:
        return self.num_orbits * self.sats_per_orbit

    def satellites(self) -> list[tuple[int, int]]:
        return [(l, k) for l in range(self.num_orbits) for k in range(self.sats_per_orbit)]

    def raan(self, orbit: int) -> float:
        return self.raan_spread * orbit / self.num_orbits

    def check_index(self, orbit: int, slot: int) -> None:
        if not (0 <= orbit < self.num_orbits and 0 <= slot < self.sats_per_orbit):
            raise IndexError(
                f"satellite ({orbit}, {slot}) out of range for "
                f"{self.num_orbits} orbits x {self.sats_per_orbit} slots"
            )


@dataclass(frozen=True)
class GroundStation:
    latitude: float
    longitude: float
    min_elevation: float = math.radians(10.0)
    name: str = "GS"

    def __post_init__(self) -> None:
        if abs(self.latitude) > math.pi / 2:
            raise ValueError(f"|latitude| must be <= pi/2, got {self.latitude}")
        if not 0.0 <= self.min_elevation < math.pi / 2:
            raise ValueError(f"min_elevation must lie in [0, pi/2), got {self.min_elevation}")


ROLLA = GroundStation(
    latitude=math.radians(37.9514),
    longitude=math.radians(-91.7713),
    min_elevation=math.radians(10.0),
    name="Rolla",
)


@dataclass(frozen=True)
class AccessWindow:
    satellite_id: tuple[int, int]
    t_start: float
    t_end: float
    visit_index: int

    def __post_init__(self) -> None:
        if not self.t_start < self.t_end:
            raise ValueError(f"window must satisfy t_start < t_end, got [{self.t_start}, {self.t_end}]")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def contains(self, t: float) -> bool:
        return self.t_start <= t <= self.t_end


def _check_altitude(h: float) -> None:
    if not h > 0:
        raise ValueError(f"altitude must be > 0 m, got {h}")


def orbital_period(h: float, constants: PhysicalConstants = EARTH) -> float:
    _check_altitude(h)
    return 2 * math.pi * math.sqrt((constants.earth_radius + h) ** 3 / constants.gm)


def orbital_velocity(h: float, constants: PhysicalConstants = EARTH) -> float:
    _check_altitude(h)
    return math.sqrt(constants.gm / (constants.earth_radius + h))


def satellite_positions(
    spec: ConstellationSpec,
    orbit: int,
    slot: int,
    t: np.ndarray | float,
    constants: PhysicalConstants = EARTH,
) -> np.ndarray:
    """Inertial positions, shape ``(..., 3)`` for time array ``t``."""
    spec.check_index(orbit, slot)
    t = np.asarray(t, dtype=float)
    h = spec.altitudes[orbit]
    radius = constants.earth_radius + h
    mean_motion = 2 * math.pi / orbital_period(h, constants)
    phase0 = 2 * math.pi * slot / spec.sats_per_orbit + orbit * spec.phasing_offset
    u = phase0 + mean_motion * t
    inc = spec.inclinations[orbit]
    raan = spec.raan(orbit)
    cu, su = np.cos(u), np.sin(u)
    ci, si = math.cos(inc), math.sin(inc)
    co, so = math.cos(raan), math.sin(raan)
    x = radius * (co * cu - so * ci * su)
    y = radius * (so * cu + co * ci * su)
    z = radius * (si * su)
    return np.stack([x, y, z], axis=-1)


def satellite_position(
    spec: ConstellationSpec, orbit: int, slot: int, t: float, constants: PhysicalConstants = EARTH
) -> np.ndarray:
    return satellite_positions(spec, orbit, slot, float(t), constants)


def ground_station_positions(
    gs: GroundStation, t: np.ndarray | float, constants: PhysicalConstants = EARTH
) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    lon = gs.longitude + constants.earth_rotation_rate * t
    cl = math.cos(gs.latitude)
    r = constants.earth_radius
    x = r * cl * np.cos(lon)
    y = r * cl * np.sin(lon)
    z = np.full_like(x, r * math.sin(gs.latitude))
    return np.stack([x, y, z], axis=-1)


def ground_station_position(gs: GroundStation, t: float, constants: PhysicalConstants = EARTH) -> np.ndarray:
    return ground_station_positions(gs, float(t), constants)


def _elevation_sine(sat_pos: np.ndarray, gs_pos: np.ndarray) -> np.ndarray:
    # cosine of the angle between r_g and r_k - r_g, i.e. sin(elevation)
    los = sat_pos - gs_pos
    num = np.sum(gs_pos * los, axis=-1)
    den = np.linalg.norm(gs_pos, axis=-1) * np.linalg.norm(los, axis=-1)
    return num / den


def elevation_angle(sat_pos: Sequence[float], gs_pos: Sequence[float]) -> float:
    sat = np.asarray(sat_pos, dtype=float)
    gsp = np.asarray(gs_pos, dtype=float)
    if not np.linalg.norm(gsp) > 0:
        raise ValueError("ground-station position must be non-zero")
    if np.array_equal(sat, gsp):
        raise ValueError("satellite and ground-station positions coincide")
    return math.asin(float(np.clip(_elevation_sine(sat, gsp), -1.0, 1.0)))


def elevation_visible(sat_pos: Sequence[float], gs_pos: Sequence[float], min_elevation: float) -> bool:
    """True iff angle(r_g, r_k - r_g) <= pi/2 - min_elevation (closed boundary)."""
    sat = np.asarray(sat_pos, dtype=float)
    gsp = np.asarray(gs_pos, dtype=float)
    if not np.linalg.norm(gsp) > 0:
        raise ValueError("ground-station position must be non-zero")
    if np.array_equal(sat, gsp):
        raise ValueError("satellite and ground-station positions coincide")
    return bool(_elevation_sine(sat, gsp) >= math.sin(min_elevation))


def slant_range(
    spec: ConstellationSpec,
    gs: GroundStation,
    orbit: int,
    slot: int,
    t: float,
    constants: PhysicalConstants = EARTH,
) -> float:
    diff = satellite_position(spec, orbit, slot, t, constants) - ground_station_position(gs, t, constants)
    return float(np.linalg.norm(diff))


def max_slant_range(h: float, min_elevation: float, constants: PhysicalConstants = EARTH) -> float:
    """Ground-to-satellite distance at the edge of the visibility cone."""
    _check_altitude(h)
    r_e = constants.earth_radius
    s = math.sin(min_elevation)
    return math.sqrt((r_e + h) ** 2 - (r_e * math.cos(min_elevation)) ** 2) - r_e * s


def ring_hop_distance(slot_a: int, slot_b: int, num_slots: int) -> int:
    if not (0 <= slot_a < num_slots and 0 <= slot_b < num_slots):
        raise IndexError(f"slots ({slot_a}, {slot_b}) out of range for a ring of {num_slots}")
    d = abs(slot_a - slot_b)
    return min(d, num_slots - d)


@dataclass(frozen=True)
class WindowSolver:
    """Coarse scan step and bisection tolerance for window boundaries (seconds)."""

    scan_step: float = 10.0
    tolerance: float = 0.01
    # sin-elevation margin below threshold at which a sampled local maximum
    # is refined in case a short pass slipped between scan samples
    peak_margin: float = 0.05

    def __post_init__(self) -> None:
        if not (self.scan_step > 0 and self.tolerance > 0):
            raise ValueError("scan_step and tolerance must be > 0")


def _visibility_margin(
    spec: ConstellationSpec,
    gs: GroundStation,
    orbit: int,
    slot: int,
    t: np.ndarray,
    constants: PhysicalConstants,
) -> np.ndarray:
    sat = satellite_positions(spec, orbit, slot, t, constants)
    gsp = ground_station_positions(gs, t, constants)
    return _elevation_sine(sat, gsp) - math.sin(gs.min_elevation)


def _bisect(fn, lo: np.ndarray, hi: np.ndarray, rising: bool, tol: float) -> np.ndarray:
    """Vectorised bisection; returns the end of each bracket on the visible side."""
    lo = lo.copy()
    hi = hi.copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        visible = fn(mid) >= 0
        # rising: invisible at lo, visible at hi; falling: the reverse
        move_hi = visible if rising else ~visible
        hi = np.where(move_hi, mid, hi)
        lo = np.where(move_hi, lo, mid)
    return hi if rising else lo


def _golden_max(fn, a: float, b: float, tol: float) -> float:
    inv_phi = (math.sqrt(5) - 1) / 2
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def satellite_windows(
    spec: ConstellationSpec,
    gs: GroundStation,
    orbit: int,
    slot: int,
    t0: float,
    t1: float,
    solver: WindowSolver = WindowSolver(),
    constants: PhysicalConstants = EARTH,
) -> list[AccessWindow]:
    if not t0 < t1:
        raise ValueError(f"horizon must satisfy t0 < t1, got [{t0}, {t1}]")
    spec.check_index(orbit, slot)

    def margin(t):
        return _visibility_margin(spec, gs, orbit, slot, np.asarray(t, dtype=float), constants)

    n = int(math.ceil((t1 - t0) / solver.scan_step))
    ts = np.minimum(t0 + solver.scan_step * np.arange(n + 1), t1)
    g = margin(ts)
    vis = g >= 0

    rises = np.nonzero(~vis[:-1] & vis[1:])[0]
    falls = np.nonzero(vis[:-1] & ~vis[1:])[0]
    starts = list(_bisect(margin, ts[rises], ts[rises + 1], True, solver.tolerance))
    ends = list(_bisect(margin, ts[falls], ts[falls + 1], False, solver.tolerance))
    if vis[0]:
        starts.insert(0, t0)
    if vis[-1]:
        ends.append(t1)
    intervals = list(zip(starts, ends))

    # grazing passes shorter than one scan step
    inner = np.arange(1, len(ts) - 1)
    peaks = inner[
        (g[inner] > g[inner - 1]) & (g[inner] >= g[inner + 1])
        & ~vis[inner] & ~vis[inner - 1] & ~vis[inner + 1]
        & (g[inner] > -solver.peak_margin)
    ]
    for i in peaks:
        a, b = float(ts[i - 1]), float(ts[i + 1])
        t_peak = _golden_max(lambda x: float(margin(x)), a, b, solver.tolerance / 10)
        if float(margin(t_peak)) >= 0:
            s = _bisect(margin, np.array([a]), np.array([t_peak]), True, solver.tolerance)[0]
            e = _bisect(margin, np.array([t_peak]), np.array([b]), False, solver.tolerance)[0]
            intervals.append((s, e))

    intervals.sort()
    out = []
    for s, e in intervals:
        if e > s:
            out.append(AccessWindow((orbit, slot), float(s), float(e), len(out) + 1))
    return out


def compute_access_windows(
    spec: ConstellationSpec,
    gs: GroundStation,
    horizon: tuple[float, float],
    solver: WindowSolver = WindowSolver(),
    constants: PhysicalConstants = EARTH,
) -> dict[tuple[int, int], list[AccessWindow]]:
    """Access windows for every satellite, keyed by ``(orbit, slot)`` in that order."""
    t0, t1 = horizon
    if not t0 < t1:
        raise ValueError(f"horizon must satisfy t0 < t1, got [{t0}, {t1}]")
    return {
        sat: satellite_windows(spec, gs, sat[0], sat[1], t0, t1, solver, constants)
        for sat in spec.satellites()
    }


WINDOW_CSV_COLUMNS = ("orbit", "slot", "visit_index", "t_start_s", "t_end_s", "duration_s")


def windows_to_csv(windows: dict[tuple[int, int], list[AccessWindow]] | Iterable[AccessWindow]) -> str:
    if isinstance(windows, dict):
        rows = [w for sat in sorted(windows) for w in windows[sat]]
    else:
        rows = sorted(windows, key=lambda w: (w.satellite_id, w.visit_index))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(WINDOW_CSV_COLUMNS)
    for w in rows:
        writer.writerow([
            w.satellite_id[0], w.satellite_id[1], w.visit_index,
            f"{w.t_start:.2f}", f"{w.t_end:.2f}", f"{w.duration:.2f}",
        ])
    return buf.getvalue()
