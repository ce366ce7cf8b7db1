"""Unit-speed vehicle on the unit sphere, written as a frame flow.

The state is a rotation g = (X | T | N): position column, unit tangent,
and their cross product.  Steering with geodesic curvature u moves the
frame by dg/ds = g * skew((u, 0, 1)), so a constant-u segment is the
group exponential and a full turn closes after 2*pi/sqrt(1 + u^2).

Sign convention: u = +u_max is the left turn, u = -u_max the right
turn, u = 0 the great circle.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ._backend import core
from .so3 import exp_rotation

LEFT = "L"
RIGHT = "R"
GREAT = "G"
KINDS = (LEFT, RIGHT, GREAT)

GREAT_PERIOD = 2.0 * math.pi


@dataclass(frozen=True)
class SabbanParams:
    """Steering bound u_max > 0 for the frame model."""

    u_max: float

    def __post_init__(self):
        if not self.u_max > 0.0:
            raise ValueError("u_max must be positive")

    @property
    def turn_radius(self) -> float:
        return 1.0 / math.sqrt(1.0 + self.u_max ** 2)

    @property
    def turn_period(self) -> float:
        """Arc length after which a saturated turn closes."""
        return 2.0 * math.pi / math.sqrt(1.0 + self.u_max ** 2)

    def control_for(self, kind: str) -> float:
        if kind == LEFT:
            return self.u_max
        if kind == RIGHT:
            return -self.u_max
        if kind == GREAT:
            return 0.0
        raise ValueError(f"unknown segment kind {kind!r}")

    def period_for(self, kind: str) -> float:
        return GREAT_PERIOD if kind == GREAT else self.turn_period


@dataclass(frozen=True)
class Segment:
    """One constant-control piece of a path."""

    kind: str
    length: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        if self.length < 0.0:
            raise ValueError("segment length must be nonnegative")


def turn_radius(u: float) -> float:
    """Radius of the circle traced under constant steering u.

    1 at u = 0 (a great circle), decreasing toward 0 as |u| grows.
    """
    if not math.isfinite(u):
        raise ValueError("steering must be finite")
    return 1.0 / math.sqrt(1.0 + u ** 2)


def control_generator(u: float) -> np.ndarray:
    """Body velocity of the frame flow: skew((u, 0, 1))."""
    return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, -u], [0.0, u, 0.0]])


def propagate_segment(g0, u: float, s: float) -> np.ndarray:
    """Exact constant-control propagation g0 * exp(s * skew((u, 0, 1)))."""
    if s < 0.0:
        raise ValueError("arc length must be nonnegative")
    return np.asarray(g0, dtype=float) @ exp_rotation((u, 0.0, 1.0), s)


def integrate_frame(g0, control: Sequence[Tuple[float, float]], s_end: float,
                    step: float = 1e-3, renorm_every: int = 100) -> np.ndarray:
    """RK4 integration of the frame flow under piecewise-constant control.

    ``control`` is a sequence of (u, length) pieces covering at least
    [0, s_end]; steps are laid out inside each piece so none straddles
    a switch.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    if s_end < 0.0:
        raise ValueError("s_end must be nonnegative")
    g = np.array(g0, dtype=float)
    remaining = s_end
    for u, length in control:
        if length < 0.0:
            raise ValueError("control piece lengths must be nonnegative")
        if remaining <= 1e-15:
            break
        span = min(length, remaining)
        g = core.rk4_frame(g, float(u), span, step, renorm_every)
        remaining -= span
    if remaining > 1e-9:
        raise ValueError("control schedule does not cover s_end")
    return g


def sample_trace(g0, word: Sequence[Segment], params: SabbanParams,
                 ds: float) -> list:
    """Sample a multi-segment path at multiples of ds plus all endpoints.

    Returns [(s, g)] with monotone s, starting at (0, g0).
    """
    if ds <= 0.0:
        raise ValueError("ds must be positive")
    g0 = np.asarray(g0, dtype=float)
    total = sum(seg.length for seg in word)
    stops = {0.0, total}
    acc = 0.0
    for seg in word:
        acc += seg.length
        stops.add(min(acc, total))
    k = 1
    while k * ds < total - 1e-12:
        stops.add(k * ds)
        k += 1
    svals = sorted(stops)

    out = []
    seg_idx = 0
    seg_start = 0.0
    g_seg = g0
    for s in svals:
        while (seg_idx < len(word)
               and s > seg_start + word[seg_idx].length + 1e-12):
            g_seg = propagate_segment(
                g_seg, params.control_for(word[seg_idx].kind),
                word[seg_idx].length)
            seg_start += word[seg_idx].length
            seg_idx += 1
        if seg_idx >= len(word):
            out.append((s, g_seg.copy()))
            continue
        u = params.control_for(word[seg_idx].kind)
        out.append((s, propagate_segment(g_seg, u, s - seg_start)))
    return out


def segment_control(word: Sequence[Segment], params: SabbanParams,
                    s: float) -> float:
    """Control value active at arc length s (boundaries go to the
    segment that ends there, except s = 0)."""
    acc = 0.0
    for i, seg in enumerate(word):
        acc += seg.length
        if s <= acc + 1e-12:
            return params.control_for(seg.kind)
    return params.control_for(word[-1].kind) if word else 0.0
