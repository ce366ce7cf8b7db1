"""Latitude/longitude/heading chart of the sphere vehicle.

State: latitude L in (-pi/2, pi/2), longitude in (-pi, pi], heading
measured from north toward east.  Unit-speed kinematics with steering
u in [-1, 1] and tightness parameter eta > 0:

    dL/ds   = cos(heading)
    dlon/ds = sin(heading) / cos(L)
    dhdg/ds = tan(L) sin(heading) + u / eta

A saturated turn traces a circle of radius eta / sqrt(1 + eta^2); the
chart is refused within 1e-6 rad of either pole.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ._backend import core
from .errors import ChartPoleError

POLE_GUARD = math.pi / 2.0 - 1e-6


def wrap_angle(x: float) -> float:
    """Wrap to (-pi, pi]."""
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y <= 0.0:
        y += 2.0 * math.pi
    return y - math.pi


@dataclass(frozen=True)
class SphericalConfig:
    lat: float
    lon: float
    heading: float

    def __post_init__(self):
        if not abs(self.lat) < POLE_GUARD:
            raise ChartPoleError(
                f"latitude {self.lat!r} inside the pole guard band")
        object.__setattr__(self, "lon", wrap_angle(self.lon))
        object.__setattr__(self, "heading", wrap_angle(self.heading))


@dataclass(frozen=True)
class SphericalParams:
    """Tightness eta > 0; small eta means a tighter saturated turn."""

    eta: float

    def __post_init__(self):
        if not self.eta > 0.0:
            raise ValueError("eta must be positive")

    @property
    def turn_radius(self) -> float:
        return self.eta / math.sqrt(1.0 + self.eta ** 2)

    @property
    def u_max(self) -> float:
        """Curvature bound of the matching frame model."""
        return 1.0 / self.eta


def rhs(c: SphericalConfig, u: float, params: SphericalParams):
    """Chart velocity (dlat, dlon, dheading) for steering u in [-1, 1]."""
    if abs(u) > 1.0 + 1e-12:
        raise ValueError("steering input must lie in [-1, 1]")
    cl = math.cos(c.lat)
    sp = math.sin(c.heading)
    return (math.cos(c.heading),
            sp / cl,
            math.tan(c.lat) * sp + u / params.eta)


def integrate(c0: SphericalConfig, control: Sequence[Tuple[float, float]],
              s_end: float, params: SphericalParams,
              step: float = 1e-3) -> SphericalConfig:
    """RK4 under piecewise-constant steering; raises ChartPoleError with
    the breach arc length if the path enters the pole guard band."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    if s_end < 0.0:
        raise ValueError("s_end must be nonnegative")
    lat, lon, hdg = c0.lat, c0.lon, c0.heading
    done = 0.0
    remaining = s_end
    for u, length in control:
        if length < 0.0:
            raise ValueError("control piece lengths must be nonnegative")
        if remaining <= 1e-15:
            break
        span = min(length, remaining)
        lat, lon, hdg, breach = core.rk4_spherical(
            lat, lon, hdg, float(u), params.eta, span, step)
        if breach >= 0.0:
            raise ChartPoleError(
                f"pole guard breached at arc length {done + breach:.6f}",
                breach_s=done + breach)
        done += span
        remaining -= span
    if remaining > 1e-9:
        raise ValueError("control schedule does not cover s_end")
    return SphericalConfig(lat, lon, hdg)


def _basis(lat: float, lon: float):
    cl, sl = math.cos(lat), math.sin(lat)
    co, so = math.cos(lon), math.sin(lon)
    x = np.array([cl * co, cl * so, sl])
    north = np.array([-sl * co, -sl * so, cl])
    east = np.array([-so, co, 0.0])
    return x, north, east


def to_rotation(c: SphericalConfig) -> np.ndarray:
    """Frame (X | T | N) of a chart configuration."""
    x, north, east = _basis(c.lat, c.lon)
    t = math.cos(c.heading) * north + math.sin(c.heading) * east
    n = np.cross(x, t)
    return np.column_stack([x, t, n])


def from_rotation(g) -> SphericalConfig:
    """Chart coordinates of a frame; fails inside the pole guard band."""
    g = np.asarray(g, dtype=float)
    x = g[:, 0]
    t = g[:, 1]
    lat = math.asin(max(-1.0, min(1.0, float(x[2]))))
    if not abs(lat) < POLE_GUARD:
        raise ChartPoleError("frame position inside the pole guard band")
    lon = math.atan2(float(x[1]), float(x[0]))
    _, north, east = _basis(lat, lon)
    heading = math.atan2(float(t @ east), float(t @ north))
    return SphericalConfig(lat, lon, heading)


def body_angular_velocity(c: SphericalConfig, dlat: float,
                          dlon: float) -> np.ndarray:
    """Body angular velocity of the geographic frame chain
    Rz(lon) * Ry(-lat - pi/2) under the given chart rates."""
    sl = math.sin(c.lat)
    cl = math.cos(c.lat)
    return np.array([
        [0.0, sl * dlon, -dlat],
        [-sl * dlon, 0.0, -cl * dlon],
        [dlat, cl * dlon, 0.0],
    ])


def geographic_frame(c: SphericalConfig) -> np.ndarray:
    """The rotation chain Rz(lon) * Ry(-lat - pi/2)."""
    a = c.lon
    b = -c.lat - math.pi / 2.0
    rz = np.array([[math.cos(a), -math.sin(a), 0.0],
                   [math.sin(a), math.cos(a), 0.0],
                   [0.0, 0.0, 1.0]])
    ry = np.array([[math.cos(b), 0.0, math.sin(b)],
                   [0.0, 1.0, 0.0],
                   [-math.sin(b), 0.0, math.cos(b)]])
    return rz @ ry


def config_to_degrees(c: SphericalConfig) -> dict:
    return {
        "lat_deg": math.degrees(c.lat),
        "lon_deg": math.degrees(c.lon),
        "heading_deg": math.degrees(c.heading),
    }


def config_from_degrees(obj) -> SphericalConfig:
    return SphericalConfig(
        lat=math.radians(float(obj["lat_deg"])),
        lon=math.radians(float(obj["lon_deg"])),
        heading=math.radians(float(obj["heading_deg"])),
    )
