"""Bounded-curvature shortest paths on the unit sphere.

A vehicle moving at unit speed on the sphere with a bound on its
geodesic curvature admits shortest paths made of at most three arcs:
maximal turns (L, R) and great-circle segments (G).  This package
provides exact and RK4 integrators for the moving-frame and the
latitude/longitude/heading forms of the dynamics, costate flows and
extremal synthesis, a word-family planner, and independent
verification tools, backed by a compiled kernel with a pure-Python
fallback.
"""

from ._backend import BACKEND
from .adjoint import (
    ExtremalResult,
    SabbanAdjoint,
    SphericalAdjoint,
    SwitchEvent,
    frame_costate_from_chart,
    h12_closed_form,
    hamiltonian_drift_rk,
    hamiltonian_sabban,
    hamiltonian_spherical,
    integrate_spherical_extremal,
    switching_control_sabban,
    switching_control_spherical,
    switching_function_profile,
    synthesize_extremal,
)
from .errors import (
    AbnormalSingularError,
    ChartPoleError,
    DomainRadiusError,
    NoSolutionError,
)
from .planner import (
    CandidatePath,
    PlannerResult,
    SolverConfig,
    enumerate_words,
    max_steering_for_radius,
    plan,
    plan_between,
    radius_in_domain,
    solve_word,
    word_endpoint,
    word_in_family,
)
from .sabban import (
    GREAT,
    LEFT,
    RIGHT,
    SabbanParams,
    Segment,
    integrate_frame,
    propagate_segment,
    sample_trace,
    turn_radius,
)
from .so3 import (
    exp_rotation,
    log_rotation,
    orthonormalize,
    random_rotation,
    rotation_distance,
    rotation_from_json,
    rotation_to_json,
)
from .spherical import (
    SphericalConfig,
    SphericalParams,
    body_angular_velocity,
    config_from_degrees,
    config_to_degrees,
    from_rotation,
    geographic_frame,
    integrate,
    to_rotation,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # errors
    "AbnormalSingularError",
    "ChartPoleError",
    "DomainRadiusError",
    "NoSolutionError",
    # rotations
    "exp_rotation",
    "log_rotation",
    "orthonormalize",
    "random_rotation",
    "rotation_distance",
    "rotation_from_json",
    "rotation_to_json",
    # frame dynamics
    "GREAT",
    "LEFT",
    "RIGHT",
    "SabbanParams",
    "Segment",
    "integrate_frame",
    "propagate_segment",
    "sample_trace",
    "turn_radius",
    # chart dynamics
    "SphericalConfig",
    "SphericalParams",
    "body_angular_velocity",
    "config_from_degrees",
    "config_to_degrees",
    "from_rotation",
    "geographic_frame",
    "integrate",
    "to_rotation",
    # costates and extremals
    "ExtremalResult",
    "SabbanAdjoint",
    "SphericalAdjoint",
    "SwitchEvent",
    "frame_costate_from_chart",
    "h12_closed_form",
    "hamiltonian_drift_rk",
    "hamiltonian_sabban",
    "hamiltonian_spherical",
    "integrate_spherical_extremal",
    "switching_control_sabban",
    "switching_control_spherical",
    "switching_function_profile",
    "synthesize_extremal",
    # planning
    "CandidatePath",
    "PlannerResult",
    "SolverConfig",
    "enumerate_words",
    "max_steering_for_radius",
    "plan",
    "plan_between",
    "radius_in_domain",
    "solve_word",
    "word_endpoint",
    "word_in_family",
]
