"""Costate flows and extremal synthesis for the sphere vehicle.

Two equivalent pictures are kept side by side:

* frame picture: costate (h1, h2, h12) paired with the frame flow.
  h12 is the switching function; on a constant-curvature arc it obeys
  h12'' + (1 + kappa^2) h12 = -cost_mult * kappa, which has the closed
  form used throughout.  The Hamiltonian is -cost_mult + h1 - kappa*h12
  and vanishes identically along minimum-length extremals.
* chart picture: costate (lam_lat, lam_lon, lam_hdg) paired with the
  latitude/longitude/heading chart; lam_lon is conserved, and lam_hdg
  plays the role h12 plays for the frame (steering u = +1 maps to
  curvature -u_max).

Synthesis integrates the switching law forward: turn arcs advance by
the exact group exponential while the closed form tracks the switching
function; zero crossings are bisected to 1e-10 in arc length.  Once a
singular (great-circle) arc is entered the costate is projected onto
the singular set and the arc persists, which is the deterministic
branch of the forward construction.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._backend import core
from .errors import AbnormalSingularError, ChartPoleError
from .sabban import GREAT, LEFT, RIGHT, SabbanParams, Segment
from .spherical import SphericalConfig, SphericalParams

DEADBAND = 1e-10
SINGULAR_RATE_TOL = 1e-9
EVENT_TOL = 1e-10


@dataclass(frozen=True)
class SabbanAdjoint:
    h1: float
    h2: float
    h12: float
    cost_mult: float  # 1 for normal extremals, 0 for abnormal ones

    def __post_init__(self):
        if self.cost_mult not in (0.0, 1.0):
            raise ValueError("cost_mult must be 0 or 1")


@dataclass(frozen=True)
class SphericalAdjoint:
    lam_lat: float
    lam_lon: float
    lam_hdg: float
    cost_mult: float  # -1 for normal extremals, 0 for abnormal ones

    def __post_init__(self):
        if self.cost_mult not in (-1.0, 0.0):
            raise ValueError("cost_mult must be -1 or 0")


def sabban_adjoint_rhs(a: SabbanAdjoint, kappa: float) -> Tuple[float, float, float]:
    """(dh1, dh2, dh12) under curvature kappa."""
    return (-kappa * a.h2, a.h12 + kappa * a.h1, -a.h2)


def spherical_adjoint_rhs(c: SphericalConfig, a: SphericalAdjoint,
                          params: SphericalParams) -> Tuple[float, float, float]:
    """(dlam_lat, dlam_lon, dlam_hdg); lam_lon is conserved."""
    cl = math.cos(c.lat)
    sl = math.sin(c.lat)
    sp = math.sin(c.heading)
    cp = math.cos(c.heading)
    dlam_lat = -a.lam_lon * sp * sl / (cl * cl) - a.lam_hdg * sp / (cl * cl)
    dlam_hdg = (a.lam_lat * sp - a.lam_lon * cp / cl
                - a.lam_hdg * (sl / cl) * cp)
    return (dlam_lat, 0.0, dlam_hdg)


def hamiltonian_sabban(a: SabbanAdjoint, kappa: float) -> float:
    return -a.cost_mult + a.h1 - kappa * a.h12


def hamiltonian_spherical(c: SphericalConfig, a: SphericalAdjoint, u: float,
                          params: SphericalParams) -> float:
    cl = math.cos(c.lat)
    sp = math.sin(c.heading)
    return (a.cost_mult + a.lam_lat * math.cos(c.heading)
            + a.lam_lon * sp / cl
            + a.lam_hdg * (math.tan(c.lat) * sp + u / params.eta))


def h12_closed_form(h12_0: float, dh12_0: float, kappa: float,
                    cost_mult: float, s):
    """Switching function and its rate on a constant-curvature arc.

    Solves x'' + (1 + kappa^2) x = -cost_mult * kappa from (h12_0,
    dh12_0); s may be a scalar or an array.
    """
    om2 = 1.0 + kappa * kappa
    om = math.sqrt(om2)
    part = -cost_mult * kappa / om2
    a = h12_0 - part
    b = dh12_0 / om
    if np.ndim(s) == 0:
        cs = math.cos(om * s)
        sn = math.sin(om * s)
        return part + a * cs + b * sn, om * (-a * sn + b * cs)
    s_arr = np.asarray(s, dtype=float)
    cs = np.cos(om * s_arr)
    sn = np.sin(om * s_arr)
    return part + a * cs + b * sn, om * (-a * sn + b * cs)


def _h12_scalar(h12_0, dh12_0, kappa, forcing, s):
    # same closed form with an explicit constant forcing term
    om2 = 1.0 + kappa * kappa
    om = math.sqrt(om2)
    part = forcing / om2
    a = h12_0 - part
    b = dh12_0 / om
    cs = math.cos(om * s)
    sn = math.sin(om * s)
    return part + a * cs + b * sn, om * (-a * sn + b * cs)


def switching_control_sabban(a: SabbanAdjoint, u_max: float,
                             deadband: float = DEADBAND) -> Optional[float]:
    """Curvature selected by the switching function, or None when the
    data is singular (caller takes kappa = 0 for normal extremals).

    Raises AbnormalSingularError when singular with zero cost
    multiplier: no control choice is defensible there.
    """
    if abs(a.h12) <= deadband:
        if a.cost_mult == 0:
            raise AbnormalSingularError(
                "singular switching function with zero cost multiplier")
        return None
    return -u_max if a.h12 > 0.0 else u_max


def switching_control_spherical(a: SphericalAdjoint,
                                deadband: float = DEADBAND) -> float:
    """Steering in {-1, 0, +1} from the chart switching function."""
    if abs(a.lam_hdg) <= deadband:
        if a.cost_mult == 0:
            raise AbnormalSingularError(
                "singular switching function with zero cost multiplier")
        return 0.0
    return 1.0 if a.lam_hdg > 0.0 else -1.0


def singular_arc_solution(c: SphericalConfig,
                          cost_mult: float) -> Tuple[float, float]:
    """Costate pair (lam_lat, lam_lon) forced on a great-circle arc.

    With cost_mult = 0 this returns (0, 0), which violates costate
    non-triviality; callers should treat that case as inadmissible.
    """
    e = float(cost_mult)
    return (-e * math.cos(c.heading),
            -e * math.cos(c.lat) * math.sin(c.heading))


@dataclass(frozen=True)
class SwitchEvent:
    s: float
    value: float          # switching function at the event
    rate: float           # d(switching function)/ds at the event
    control_before: float
    control_after: float


@dataclass
class ExtremalResult:
    word: List[Segment]
    word_string: str
    switches: List[SwitchEvent]
    samples: List[Tuple[float, np.ndarray]]  # frame at segment boundaries
    final_adjoint: SabbanAdjoint
    hamiltonian_drift: float
    in_family: bool


def _bisect_crossing(h12_0, dh12_0, kappa, forcing, lo, hi, expected_pos):
    """First point in (lo, hi] where the closed form leaves the expected
    sign; bisected to 1e-10 in arc length."""
    for _ in range(200):
        if hi - lo <= EVENT_TOL:
            break
        mid = 0.5 * (lo + hi)
        f, _ = _h12_scalar(h12_0, dh12_0, kappa, forcing, mid)
        if f != 0.0 and (f > 0.0) == expected_pos:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def synthesize_extremal(a0: SabbanAdjoint, g0, params: SabbanParams,
                        s_max: float, step: float = 1e-3) -> ExtremalResult:
    """Forward synthesis of an extremal under the bang/singular law.

    Turn arcs and the costate advance in closed form; ``step`` is only
    the scan resolution for locating switching-function zero crossings,
    which are then bisected to 1e-10.  The result records the emitted
    word, the switch events, and whether the word stays inside the
    three-letter candidate family.
    """
    from .planner import word_in_family

    if s_max <= 0.0:
        raise ValueError("s_max must be positive")
    if step <= 0.0:
        raise ValueError("step must be positive")
    u_max = params.u_max
    g = np.array(g0, dtype=float)
    h1, h2, h12 = float(a0.h1), float(a0.h2), float(a0.h12)
    lam = float(a0.cost_mult)

    # initial control from the switching data
    if abs(h12) <= DEADBAND:
        if abs(h2) <= SINGULAR_RATE_TOL:
            if lam == 0.0:
                raise AbnormalSingularError(
                    "singular switching function with zero cost multiplier")
            kappa = 0.0
            h12 = 0.0
            h2 = 0.0
        else:
            # exactly on a transversal crossing: follow where it is headed
            kappa = -u_max if -h2 > 0.0 else u_max
    else:
        kappa = -u_max if h12 > 0.0 else u_max

    h0 = -lam + h1 - kappa * h12
    s = 0.0
    word: List[Segment] = []
    switches: List[SwitchEvent] = []
    samples: List[Tuple[float, np.ndarray]] = [(0.0, g.copy())]
    drift = 0.0

    while s < s_max - 1e-15:
        remaining = s_max - s
        h_seg = -lam + h1 - kappa * h12
        drift = max(drift, abs(h_seg - h0))

        if kappa == 0.0:
            # singular great-circle arc: persists for the rest of the window
            g = g @ core.rodrigues(np.array([0.0, 0.0, 1.0]), remaining)
            word.append(Segment(GREAT, remaining))
            samples.append((s_max, g.copy()))
            s = s_max
            break

        forcing = -kappa * (lam + h_seg)
        dh12_now = -h2
        expected_pos = kappa < 0.0  # kappa = -u_max rides h12 > 0
        n_scan = max(1, int(math.ceil(remaining / step)))
        tau_prev = 0.0
        t_cross = None
        for j in range(1, n_scan + 1):
            tau = min(j * step, remaining)
            f, _ = _h12_scalar(h12, dh12_now, kappa, forcing, tau)
            if f == 0.0 or (f > 0.0) != expected_pos:
                t_cross = _bisect_crossing(h12, dh12_now, kappa, forcing,
                                           tau_prev, tau, expected_pos)
                break
            tau_prev = tau

        seg_len = remaining if t_cross is None else t_cross
        g = g @ core.rodrigues(np.array([kappa, 0.0, 1.0]), seg_len)
        val, rate = _h12_scalar(h12, dh12_now, kappa, forcing, seg_len)
        h1 = h1 + kappa * (val - h12)  # exact: dh1/ds = kappa * dh12/ds
        h12 = val
        h2 = -rate
        word.append(Segment(LEFT if kappa > 0.0 else RIGHT, seg_len))
        s += seg_len
        samples.append((s, g.copy()))
        if t_cross is None:
            break

        if abs(rate) <= SINGULAR_RATE_TOL:
            # tangential contact: enter the singular arc
            if lam == 0.0:
                raise AbnormalSingularError(
                    "singular switching function with zero cost multiplier")
            new_kappa = 0.0
        else:
            new_kappa = -u_max if rate > 0.0 else u_max
        switches.append(SwitchEvent(s, val, rate, kappa, new_kappa))
        # the crossing is exact in the model; drop the bisection residue
        h12 = 0.0
        if new_kappa == 0.0:
            h2 = 0.0
        kappa = new_kappa

    final = SabbanAdjoint(h1, h2, h12, lam)
    word_str = "".join(seg.kind for seg in word)
    return ExtremalResult(
        word=word,
        word_string=word_str,
        switches=switches,
        samples=samples,
        final_adjoint=final,
        hamiltonian_drift=drift,
        in_family=word_in_family(word_str),
    )


def switching_function_profile(a0: SabbanAdjoint, word: Sequence[Segment],
                               params: SabbanParams, s_values):
    """Closed-form h12 and dh12/ds at arbitrary arc lengths along a word.

    Walks the word with the same exact costate updates the synthesis
    uses, so the profile agrees with synthesize_extremal to rounding.
    """
    s_arr = np.asarray(s_values, dtype=float)
    total = sum(seg.length for seg in word)
    if np.any(s_arr < -1e-9) or np.any(s_arr > total + 1e-9):
        raise ValueError("arc lengths fall outside the word")
    values = np.empty_like(s_arr)
    rates = np.empty_like(s_arr)
    h1, h2, h12 = float(a0.h1), float(a0.h2), float(a0.h12)
    lam = float(a0.cost_mult)
    pos = 0.0
    for seg in word:
        kappa = params.control_for(seg.kind)
        h_seg = -lam + h1 - kappa * h12
        forcing = -kappa * (lam + h_seg)
        om2 = 1.0 + kappa * kappa
        om = math.sqrt(om2)
        part = forcing / om2
        a_c = h12 - part
        b_c = -h2 / om
        mask = (s_arr >= pos - 1e-9) & (s_arr <= pos + seg.length + 1e-9)
        if np.any(mask):
            tau = s_arr[mask] - pos
            cs = np.cos(om * tau)
            sn = np.sin(om * tau)
            values[mask] = part + a_c * cs + b_c * sn
            rates[mask] = om * (-a_c * sn + b_c * cs)
        val, rate = _h12_scalar(h12, -h2, kappa, forcing, seg.length)
        h1 = h1 + kappa * (val - h12)
        h12 = val
        h2 = -rate
        pos += seg.length
    return values, rates


def frame_costate_from_chart(c: SphericalConfig,
                             a: SphericalAdjoint) -> SabbanAdjoint:
    """Frame costate matching a chart costate at the same configuration.

    Matching the steering-dependent and steering-free parts of the two
    Hamiltonians gives h12 = lam_hdg, h2 = -d(lam_hdg)/ds, and h1 from
    the remaining terms; the cost multipliers pair as (e, lam) =
    (-1, 1) and (0, 0), and both Hamiltonians take the same value.
    """
    cl = math.cos(c.lat)
    sp = math.sin(c.heading)
    cp = math.cos(c.heading)
    h12 = a.lam_hdg
    dh12 = (a.lam_lat * sp - a.lam_lon * cp / cl
            - a.lam_hdg * (math.sin(c.lat) / cl) * cp)
    h1_core = (a.lam_lat * cp + a.lam_lon * sp / cl
               + a.lam_hdg * math.tan(c.lat) * sp)
    lam = -a.cost_mult
    return SabbanAdjoint(h1=lam + a.cost_mult + h1_core, h2=-dh12,
                         h12=h12, cost_mult=lam)


def hamiltonian_drift_rk(a0: SabbanAdjoint, word: Sequence[Segment],
                         params: SabbanParams, step: float = 1e-3) -> float:
    """Max |H - H(0)| along an RK4 re-integration of the costate under
    the word's curvature schedule (independent of the closed form)."""
    h1, h2, h12 = float(a0.h1), float(a0.h2), float(a0.h12)
    lam = float(a0.cost_mult)
    kappa0 = params.control_for(word[0].kind) if word else 0.0
    h_ref = -lam + h1 - kappa0 * h12
    drift = 0.0
    for seg in word:
        kappa = params.control_for(seg.kind)
        drift = max(drift, abs((-lam + h1 - kappa * h12) - h_ref))
        done = 0.0
        while done < seg.length - 1e-15:
            span = min(0.05, seg.length - done)
            h1, h2, h12 = core.rk4_costate(h1, h2, h12, kappa, span, step)
            done += span
            drift = max(drift, abs((-lam + h1 - kappa * h12) - h_ref))
    return drift


@dataclass
class SphericalExtremal:
    rows: np.ndarray  # columns: s, lat, lon, hdg, lam_lat, lam_lon, lam_hdg, u
    switches: List[SwitchEvent]
    word: List[Segment]
    max_abs_hamiltonian: float
    hamiltonian_drift: float  # max - min of H along the rows


def integrate_spherical_extremal(c0: SphericalConfig, a0: SphericalAdjoint,
                                 params: SphericalParams, s_max: float,
                                 step: float = 1e-3,
                                 chunk: float = 0.5) -> SphericalExtremal:
    """RK4 synthesis in the chart under u = sign(lam_hdg).

    Zero crossings of lam_hdg are bisected to 1e-12 in arc length so the
    steering flips where the switching function vanishes (the
    Hamiltonian is continuous there).  Raises ChartPoleError if the
    trajectory enters the pole guard band.
    """
    state = np.array([c0.lat, c0.lon, c0.heading,
                      a0.lam_lat, a0.lam_lon, a0.lam_hdg])
    e = float(a0.cost_mult)
    u = switching_control_spherical(a0)
    eta = params.eta

    s = 0.0
    rows = [(0.0, *state, u)]
    switches: List[SwitchEvent] = []
    word: List[Segment] = []
    seg_start = 0.0

    def flush_segment(end_s, u_val):
        if end_s > seg_start + 1e-15:
            kind = GREAT if u_val == 0.0 else (RIGHT if u_val > 0 else LEFT)
            word.append(Segment(kind, end_s - seg_start))

    while s < s_max - 1e-12:
        span = min(chunk, s_max - s)
        seg_rows, breach = core.rk4_spherical_adjoint_dense(
            state, u, eta, span, step)
        if breach >= 0.0:
            raise ChartPoleError(
                f"pole guard breached at arc length {s + breach:.6f}",
                breach_s=s + breach)
        cross_idx = None
        if u != 0.0:
            sign0 = u > 0.0  # steering sign tracks the switching sign
            for j in range(1, seg_rows.shape[0]):
                if seg_rows[j, 6] == 0.0 or (seg_rows[j, 6] > 0.0) != sign0:
                    cross_idx = j
                    break
        if cross_idx is None:
            for j in range(1, seg_rows.shape[0]):
                rows.append((s + seg_rows[j, 0], *seg_rows[j, 1:], u))
            state = seg_rows[-1, 1:].copy()
            s += span
            continue

        # keep rows strictly before the crossing step, then bisect inside it
        for j in range(1, cross_idx):
            rows.append((s + seg_rows[j, 0], *seg_rows[j, 1:], u))
        pre = seg_rows[cross_idx - 1, 1:].copy()
        lo = 0.0
        hi = seg_rows[cross_idx, 0] - seg_rows[cross_idx - 1, 0]
        for _ in range(80):
            if hi - lo <= 1e-12:
                break
            mid = 0.5 * (lo + hi)
            trial, _ = core.rk4_spherical_adjoint(pre, u, eta, mid, step)
            if trial[5] != 0.0 and (trial[5] > 0.0) == sign0:
                lo = mid
            else:
                hi = mid
        state, _ = core.rk4_spherical_adjoint(pre, u, eta, hi, step)
        s_switch = s + seg_rows[cross_idx - 1, 0] + hi
        cfg = SphericalConfig(state[0], state[1], state[2])
        adj = SphericalAdjoint(state[3], state[4], state[5], e)
        rate = spherical_adjoint_rhs(cfg, adj, params)[2]
        if abs(state[5]) <= DEADBAND and abs(rate) <= SINGULAR_RATE_TOL:
            if e == 0.0:
                raise AbnormalSingularError(
                    "singular switching function with zero cost multiplier")
            new_u = 0.0
        else:
            new_u = 1.0 if rate > 0.0 else -1.0
        rows.append((s_switch, *state, new_u))
        flush_segment(s_switch, u)
        switches.append(SwitchEvent(s_switch, float(state[5]), rate, u, new_u))
        seg_start = s_switch
        s = s_switch
        u = new_u

    flush_segment(s_max, u)
    rows_arr = np.array(rows)
    ham = _hamiltonian_rows(rows_arr, e, eta)
    return SphericalExtremal(
        rows=rows_arr,
        switches=switches,
        word=word,
        max_abs_hamiltonian=float(np.max(np.abs(ham))),
        hamiltonian_drift=float(np.max(ham) - np.min(ham)),
    )


def _hamiltonian_rows(rows: np.ndarray, e: float, eta: float) -> np.ndarray:
    lat = rows[:, 1]
    hdg = rows[:, 3]
    lam_lat = rows[:, 4]
    lam_lon = rows[:, 5]
    lam_hdg = rows[:, 6]
    u = rows[:, 7]
    cl = np.cos(lat)
    sp = np.sin(hdg)
    return (e + lam_lat * np.cos(hdg) + lam_lon * sp / cl
            + lam_hdg * (np.tan(lat) * sp + u / eta))
