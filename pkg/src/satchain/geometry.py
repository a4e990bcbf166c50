"""Chain geometry for an equatorial string-of-pearls constellation.

All satellites share one circular equatorial orbit and are equally spaced so
that the chain spans the ground-station separation when the pass is centered
(pass_phase = 0.5).  Both ground stations sit on the equator.  Everything is
solved in the orbital plane; tests cross-check against a 3-D vector oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import ATMOSPHERE_CLEARANCE, C_LIGHT, EARTH_RADIUS, MU_EARTH
from .errors import GeometryError, InfeasibleGeometryError


@dataclass(frozen=True)
class ConstellationSpec:
    n_sat: int
    orbit_altitude: float
    ground_distance: float
    ground_altitude: float = 2_000.0
    earth_radius: float = EARTH_RADIUS
    min_elevation: float = math.radians(20.0)

    def __post_init__(self):
        if self.n_sat < 1:
            raise GeometryError("n_sat must be >= 1")
        if not (self.orbit_altitude > self.ground_altitude >= 0.0):
            raise GeometryError("need orbit_altitude > ground_altitude >= 0")
        if self.ground_distance <= 0.0:
            raise GeometryError("ground_distance must be > 0")
        if not (0.0 <= self.min_elevation < math.pi / 2):
            raise GeometryError("min_elevation must lie in [0, pi/2)")

    @property
    def r_orbit(self) -> float:
        return self.earth_radius + self.orbit_altitude

    @property
    def r_ground(self) -> float:
        return self.earth_radius + self.ground_altitude

    @property
    def ground_angle(self) -> float:
        """Great-circle angle between the two ground stations."""
        return self.ground_distance / self.earth_radius

    @property
    def sat_spacing(self) -> float:
        """Angular spacing between adjacent satellites."""
        if self.n_sat == 1:
            return 0.0
        return self.ground_angle / (self.n_sat - 1)

    @property
    def horizon_half_angle(self) -> float:
        """Central angle at which a satellite sits on a station's horizon."""
        return math.acos(self.r_ground / self.r_orbit)

    @property
    def orbital_angular_velocity(self) -> float:
        return math.sqrt(MU_EARTH / self.r_orbit**3)


@dataclass(frozen=True)
class ChainGeometry:
    link_lengths: tuple[float, ...]
    elevation_angles: tuple[float, float]
    t_com: float
    in_view: bool


def _elevation(r_ground: float, r_sat: float, separation_angle: float) -> tuple[float, float]:
    """Elevation of the satellite above the station's local horizon and the
    slant range, from the central angle between them."""
    cos_phi = math.cos(separation_angle)
    slant = math.sqrt(r_ground**2 + r_sat**2 - 2.0 * r_ground * r_sat * cos_phi)
    sin_el = (r_sat * cos_phi - r_ground) / slant
    return math.asin(max(-1.0, min(1.0, sin_el))), slant


def place_chain(spec: ConstellationSpec, pass_phase: float) -> ChainGeometry:
    """Geometry of the full chain at one point of the pass.

    pass_phase in [0, 1] sweeps the chain center across the horizon-to-horizon
    pass; 0.5 centers the chain between the two ground stations.
    """
    if not (0.0 <= pass_phase <= 1.0):
        raise GeometryError("pass_phase must lie in [0, 1]")
    n = spec.n_sat
    r_s = spec.r_orbit
    r_g = spec.r_ground
    spacing = spec.sat_spacing

    # Inter-satellite line of sight must clear the atmosphere; the chord's
    # closest approach to the Earth center is r_s * cos(spacing / 2).
    if n >= 2:
        min_radius = r_s * math.cos(spacing / 2.0)
        if min_radius < spec.earth_radius + ATMOSPHERE_CLEARANCE:
            raise GeometryError(
                "adjacent-satellite line of sight dips below the "
                f"{ATMOSPHERE_CLEARANCE / 1e3:.0f} km clearance altitude"
            )

    center = (pass_phase - 0.5) * 2.0 * spec.horizon_half_angle
    half_g = spec.ground_angle / 2.0
    # Station A at -half_g, station B at +half_g; satellite i at angle
    # center + (i - (n-1)/2) * spacing.
    sat_angles = [center + (i - (n - 1) / 2.0) * spacing for i in range(n)]

    el_a, slant_a = _elevation(r_g, r_s, sat_angles[0] - (-half_g))
    el_b, slant_b = _elevation(r_g, r_s, half_g - sat_angles[-1])

    sat_chord = 2.0 * r_s * math.sin(spacing / 2.0)
    link_lengths = (slant_a, *([sat_chord] * (n - 1)), slant_b)

    in_view = el_a >= spec.min_elevation and el_b >= spec.min_elevation
    t_com = 2.0 * max(link_lengths) / C_LIGHT
    return ChainGeometry(
        link_lengths=link_lengths,
        elevation_angles=(el_a, el_b),
        t_com=t_com,
        in_view=in_view,
    )


def pass_window(spec: ConstellationSpec, sampling: int) -> list[tuple[float, ChainGeometry]]:
    """Uniformly sampled in-view phases across the horizon-to-horizon pass.

    Empty when no phase yields mutual visibility (infeasible ground distance
    for the given chain).
    """
    if sampling < 2:
        raise GeometryError("sampling must be >= 2")
    out = []
    for k in range(sampling):
        phase = k / (sampling - 1)
        geom = place_chain(spec, phase)
        if geom.in_view:
            out.append((phase, geom))
    return out


def window_bounds(spec: ConstellationSpec, resolution: int = 2048, tol: float = 1e-10) -> tuple[float, float]:
    """In-view phase interval, refined by bisection on the visibility edges."""
    coarse = [k / (resolution - 1) for k in range(resolution)]
    flags = [place_chain(spec, p).in_view for p in coarse]
    if not any(flags):
        raise InfeasibleGeometryError("no pass phase gives mutual visibility")

    first = flags.index(True)
    last = len(flags) - 1 - flags[::-1].index(True)

    def refine(lo: float, hi: float, lo_vis: bool) -> float:
        # invariant: visibility differs between lo and hi
        while hi - lo > tol:
            mid = (lo + hi) / 2.0
            if place_chain(spec, mid).in_view == lo_vis:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2.0

    lo = coarse[first] if first == 0 else refine(coarse[first - 1], coarse[first], False)
    hi = coarse[last] if last == resolution - 1 else refine(coarse[last], coarse[last + 1], True)
    return lo, hi


def pass_phase_span_seconds(spec: ConstellationSpec) -> float:
    """Duration of the full pass_phase in [0,1] range in seconds."""
    return 2.0 * spec.horizon_half_angle / spec.orbital_angular_velocity


def window_duration(spec: ConstellationSpec, resolution: int = 2048) -> float:
    """Duration of the mutual-visibility window in seconds."""
    lo, hi = window_bounds(spec, resolution)
    return (hi - lo) * pass_phase_span_seconds(spec)
