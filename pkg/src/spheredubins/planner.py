"""Shortest-path planning over the candidate word family.

Every sufficiently short optimal path for the sphere vehicle is a
concatenation of at most three arcs: maximal left turns (L), maximal
right turns (R), and great-circle arcs (G), with G appearing only
between two turns.  Including degenerate subwords this gives fifteen
candidate words.  For each word the arc lengths are unknowns of a
rotation equation

    exp(s1 A1) exp(s2 A2) ... exp(sk Ak) = target

with A_i = skew((u_i, 0, 1)), which is solved by a batched multi-start
Gauss-Newton iteration with an analytic Jacobian.  The planner then
returns the candidate with the smallest total arc length.

Arc lengths are searched on the closed interval [0, P_i] where P_i is
the period of the arc's generator, so full-circle solutions (for
example a 2*pi great-circle arc returning to the start) are reported
alongside the trivial zero-length one.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ._backend import core
from .errors import DomainRadiusError, NoSolutionError
from .sabban import GREAT, LEFT, RIGHT, SabbanParams, Segment
from .spherical import SphericalConfig, to_rotation

RADIUS_DOMAIN_TOL = 1e-12
_ISOLATED_RADIUS = 1.0 / math.sqrt(2.0)

WORDS: Tuple[str, ...] = (
    "G", "L", "R",
    "GL", "GR", "LG", "LR", "RG", "RL",
    "LGL", "LGR", "LRL", "RGL", "RGR", "RLR",
)

_WORD_SET = frozenset(WORDS)


def enumerate_words() -> Tuple[str, ...]:
    """The fifteen candidate words, in (length, lexicographic) order."""
    return WORDS


def word_in_family(word: str) -> bool:
    return word in _WORD_SET


def radius_in_domain(radius: float, tol: float = RADIUS_DOMAIN_TOL) -> bool:
    """True when the turn radius carries the completeness guarantee:
    0 < r <= 1/2, plus the isolated value 1/sqrt(2)."""
    if abs(radius - _ISOLATED_RADIUS) <= tol:
        return True
    return 0.0 < radius <= 0.5 + tol


def max_steering_for_radius(radius: float) -> float:
    """Steering bound u_max giving turn radius 1/sqrt(1 + u_max^2)."""
    if not 0.0 < radius <= 1.0:
        raise DomainRadiusError(
            f"turn radius must lie in (0, 1], got {radius!r}")
    if abs(radius - _ISOLATED_RADIUS) <= RADIUS_DOMAIN_TOL:
        return 1.0
    return math.sqrt(max(1.0 / (radius * radius) - 1.0, 0.0))


@dataclass(frozen=True)
class SolverConfig:
    starts_per_length: int = 12
    max_iterations: int = 50
    residual_accept: float = 1e-9
    polish_tol: float = 1e-13
    dedupe_tol: float = 1e-6
    regularization: float = 1e-14
    backtrack_max: int = 8


@dataclass(frozen=True)
class CandidatePath:
    word: str
    lengths: Tuple[float, ...]
    total_length: float
    residual: float

    def segments(self) -> List[Segment]:
        return [Segment(ch, s) for ch, s in zip(self.word, self.lengths)]

    def controls(self, params: SabbanParams) -> List[Tuple[float, float]]:
        """(steering, arc length) pairs for the integrators."""
        return [(params.control_for(ch), s)
                for ch, s in zip(self.word, self.lengths)]

    def endpoint(self, params: SabbanParams) -> np.ndarray:
        return word_endpoint(self.word, self.lengths, params)


@dataclass
class PlannerResult:
    best: CandidatePath
    candidates: List[CandidatePath]
    params: SabbanParams
    target: np.ndarray = field(repr=False)


def word_endpoint(word: str, lengths: Sequence[float],
                  params: SabbanParams) -> np.ndarray:
    """Net frame rotation produced by running the word's arcs."""
    if len(word) != len(lengths):
        raise ValueError("word and lengths disagree in size")
    g = np.eye(3)
    for ch, s in zip(word, lengths):
        axis = np.array([params.control_for(ch), 0.0, 1.0])
        g = g @ core.rodrigues(axis, float(s))
    return g


def _left_jacobian_inverse(r: np.ndarray) -> np.ndarray:
    """Batched inverse left Jacobian of the rotation logarithm.

    Uses the half-angle form of the series coefficient, which stays
    well conditioned up to the pi cut where rotation vectors live.
    """
    n = r.shape[0]
    theta = np.sqrt(np.sum(r * r, axis=1))
    w = np.zeros((n, 3, 3))
    w[:, 0, 1] = -r[:, 2]
    w[:, 0, 2] = r[:, 1]
    w[:, 1, 0] = r[:, 2]
    w[:, 1, 2] = -r[:, 0]
    w[:, 2, 0] = -r[:, 1]
    w[:, 2, 1] = r[:, 0]
    beta = np.empty(n)
    small = theta < 1e-4
    ts = theta[small]
    beta[small] = 1.0 / 12.0 + ts * ts / 720.0
    tb = theta[~small]
    beta[~small] = 1.0 / (tb * tb) - 0.5 / (tb * np.tan(0.5 * tb))
    return np.eye(3) - 0.5 * w + beta[:, None, None] * np.matmul(w, w)


class _WordSystem:
    """Residual and Jacobian evaluations for one word against one target."""

    def __init__(self, word: str, target: np.ndarray, params: SabbanParams):
        self.word = word
        self.k = len(word)
        self.target = np.asarray(target, dtype=float)
        self.axes = [np.array([params.control_for(ch), 0.0, 1.0])
                     for ch in word]
        self.periods = np.array([params.period_for(ch) for ch in word])

    def residual(self, lengths: np.ndarray):
        """Rotation-vector residual log(E(s)^T target) and the factor
        matrices, for a (n, k) batch of length vectors."""
        mats = [core.exp_batch(self.axes[i], lengths[:, i])
                for i in range(self.k)]
        e = mats[0]
        for i in range(1, self.k):
            e = core.compose_batch(e, mats[i])
        m = np.matmul(np.transpose(e, (0, 2, 1)), self.target)
        return core.rotvec_batch(m), mats

    def jacobian(self, mats, res: np.ndarray) -> np.ndarray:
        """d(residual)/d(lengths), shape (n, 3, k).

        The body direction of the i-th arc is Q_i^T a_i with Q_i the
        product of the factors after i; pushing it through the
        logarithm gives the column -Jl^{-1}(res) Q_i^T a_i.
        """
        n = res.shape[0]
        jl_inv = _left_jacobian_inverse(res)
        jac = np.empty((n, 3, self.k))
        suffix = np.broadcast_to(np.eye(3), (n, 3, 3))
        cols = [None] * self.k
        for i in range(self.k - 1, -1, -1):
            cols[i] = np.einsum("nji,j->ni", suffix, self.axes[i])
            if i > 0:
                suffix = np.matmul(mats[i], suffix)
        for i in range(self.k):
            jac[:, :, i] = -np.einsum("nab,nb->na", jl_inv, cols[i])
        return jac


def _seed_grid(periods: np.ndarray, starts: int) -> np.ndarray:
    axes = [np.linspace(0.0, p, starts, endpoint=False) for p in periods]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _dedupe(rows: List[Tuple[Tuple[float, ...], float]],
            tol: float) -> List[Tuple[Tuple[float, ...], float]]:
    rows.sort(key=lambda item: (sum(item[0]), item[0]))
    kept: List[Tuple[Tuple[float, ...], float]] = []
    for lengths, res in rows:
        dup = False
        for kl, _ in kept:
            if max(abs(a - b) for a, b in zip(lengths, kl)) <= tol:
                dup = True
                break
        if not dup:
            kept.append((lengths, res))
    return kept


def solve_word(word: str, target: np.ndarray, params: SabbanParams,
               config: Optional[SolverConfig] = None) -> List[CandidatePath]:
    """All arc-length solutions of one word for a relative rotation.

    Runs starts_per_length^k damped Gauss-Newton iterations in one
    numpy batch and keeps solutions whose final rotation residual is
    below config.residual_accept, deduplicated and sorted by total
    length.
    """
    if not word_in_family(word):
        raise ValueError(f"unknown word {word!r}")
    cfg = config or SolverConfig()
    sys_ = _WordSystem(word, target, params)
    k = sys_.k
    periods = sys_.periods
    lo = -0.3
    hi = periods + 0.3
    step_cap = 0.5 * periods

    lengths = _seed_grid(periods, cfg.starts_per_length)
    res, mats = sys_.residual(lengths)
    norms = np.sqrt(np.sum(res * res, axis=1))
    stalled = np.zeros(lengths.shape[0], dtype=bool)
    reg = cfg.regularization * np.eye(k)

    for _ in range(cfg.max_iterations):
        active = (norms > cfg.polish_tol) & ~stalled
        if not np.any(active):
            break
        jac = sys_.jacobian(mats, res)
        ata = np.einsum("nai,naj->nij", jac, jac) + reg
        rhs = np.einsum("nai,na->ni", jac, res)
        try:
            delta = -np.linalg.solve(ata, rhs[:, :, None])[:, :, 0]
        except np.linalg.LinAlgError:
            delta = -np.linalg.solve(ata + 1e-8 * np.eye(k),
                                     rhs[:, :, None])[:, :, 0]
        np.clip(delta, -step_cap, step_cap, out=delta)

        alpha = np.ones(lengths.shape[0])
        pending = active.copy()
        trial = lengths.copy()
        trial_norms = norms.copy()
        for _bt in range(cfg.backtrack_max + 1):
            if not np.any(pending):
                break
            idx = np.nonzero(pending)[0]
            cand = lengths[idx] + alpha[idx, None] * delta[idx]
            np.clip(cand, lo, hi, out=cand)
            r_c, _ = sys_.residual(cand)
            n_c = np.sqrt(np.sum(r_c * r_c, axis=1))
            ok = n_c <= norms[idx]
            good = idx[ok]
            trial[good] = cand[ok]
            trial_norms[good] = n_c[ok]
            pending[good] = False
            alpha[idx[~ok]] *= 0.5
        stalled |= pending
        lengths = trial
        res, mats = sys_.residual(lengths)
        norms = np.sqrt(np.sum(res * res, axis=1))

    clamped = np.clip(lengths, 0.0, periods)
    in_box = (np.all(lengths >= -1e-12, axis=1)
              & np.all(lengths <= periods + 1e-9, axis=1))
    r_f, _ = sys_.residual(clamped)
    n_f = np.sqrt(np.sum(r_f * r_f, axis=1))
    keep = in_box & (n_f < cfg.residual_accept)

    rows = [(tuple(float(v) for v in clamped[i]), float(n_f[i]))
            for i in np.nonzero(keep)[0]]
    rows = _dedupe(rows, cfg.dedupe_tol)
    return [CandidatePath(word, lengths_, float(sum(lengths_)), res_)
            for lengths_, res_ in rows]


def plan(target: np.ndarray, radius: float, *,
         allow_out_of_domain: bool = False,
         config: Optional[SolverConfig] = None) -> PlannerResult:
    """Shortest candidate path realizing a relative frame rotation.

    The turn radius must lie in (0, 1/2] or equal 1/sqrt(2) (the range
    with a completeness guarantee for the word family) unless
    allow_out_of_domain is set.  Totals are compared at 1e-10
    resolution; ties break on word length, then the word, then the
    length vector, so a bare turn outranks the same turn padded with
    zero-length segments.
    """
    if not radius_in_domain(radius) and not allow_out_of_domain:
        raise DomainRadiusError(
            "turn radius {:.12g} outside (0, 0.5] and not 1/sqrt(2); "
            "pass allow_out_of_domain to search anyway".format(radius))
    params = SabbanParams(max_steering_for_radius(radius))
    target = np.asarray(target, dtype=float)
    candidates: List[CandidatePath] = []
    for word in WORDS:
        candidates.extend(solve_word(word, target, params, config))
    if not candidates:
        raise NoSolutionError(
            "no candidate word produced a solution for this target")
    # quantize totals so numerically tied lengths (e.g. a bare turn vs
    # the same turn padded with zero-length segments) break on the
    # simpler word rather than on floating-point noise
    candidates.sort(key=lambda c: (round(c.total_length, 10), len(c.word),
                                   c.word, c.lengths))
    return PlannerResult(best=candidates[0], candidates=candidates,
                         params=params, target=target)


ConfigLike = Union[np.ndarray, SphericalConfig]


def _as_rotation(value: ConfigLike) -> np.ndarray:
    if isinstance(value, SphericalConfig):
        return to_rotation(value)
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3, 3):
        raise ValueError("expected a 3x3 rotation or a SphericalConfig")
    return arr


def plan_between(start: ConfigLike, goal: ConfigLike, radius: float,
                 **kwargs) -> PlannerResult:
    """plan() for a start/goal pair given as frames or chart configs."""
    g0 = _as_rotation(start)
    g1 = _as_rotation(goal)
    return plan(g0.T @ g1, radius, **kwargs)
