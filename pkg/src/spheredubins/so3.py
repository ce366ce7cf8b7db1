"""Rotation-matrix utilities.

Rotations are plain (3, 3) numpy arrays.  A matrix counts as a valid
rotation when ``||m^T m - I||_F <= 1e-9`` and ``|det(m) - 1| <= 1e-9``;
``check_rotation`` enforces exactly that.
"""

import math
from typing import NamedTuple

import numpy as np

from ._backend import core

ROTATION_TOL = 1e-9


class AxisAngle(NamedTuple):
    axis: np.ndarray
    angle: float


def skew(v) -> np.ndarray:
    """Cross-product matrix: skew(v) @ w == cross(v, w)."""
    x, y, z = (float(c) for c in v)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def exp_rotation(omega, s: float = 1.0) -> np.ndarray:
    """Rotation by arc length s about omega: exp(s * skew(omega))."""
    return core.rodrigues(np.asarray(omega, dtype=float), float(s))


def log_rotation(m) -> AxisAngle:
    """Unit axis and angle in [0, pi] with exp_rotation(axis, angle) == m.

    The axis sign is arbitrary at angle pi (both choices reproduce m);
    at angle 0 the axis defaults to (1, 0, 0).
    """
    m = np.asarray(m, dtype=float)
    w = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    wn = float(np.linalg.norm(w))
    theta = math.atan2(wn, float(np.trace(m)) - 1.0)
    if theta < 1e-12:
        return AxisAngle(np.array([1.0, 0.0, 0.0]), theta)
    if theta > math.pi - 1e-5:
        # near a half turn the antisymmetric part degenerates; recover the
        # axis from (sym(m) + I)/2 ~ axis axis^T instead.  Symmetrizing
        # first drops the O(pi - theta) contamination from the sin term,
        # leaving an O((pi - theta)^2) axis error right up to the cut
        b = 0.25 * (m + m.T) + 0.5 * np.eye(3)
        j = int(np.argmax(np.diag(b)))
        axis = b[:, j]
        axis = axis / np.linalg.norm(axis)
        if wn > 1e-12 and float(w @ axis) < 0.0:
            axis = -axis
        return AxisAngle(axis, theta)
    return AxisAngle(w / wn, theta)


def rotation_distance(a, b) -> float:
    """Angle of the relative rotation a^T b, in [0, pi]."""
    m = np.asarray(a, dtype=float).T @ np.asarray(b, dtype=float)
    w = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    return math.atan2(float(np.linalg.norm(w)), float(np.trace(m)) - 1.0)


def orthonormalize(m) -> np.ndarray:
    """Project a near-rotation back onto SO(3) (polar factor, Newton).

    Raises ValueError when det(m) <= 0; the iteration is only meant for
    matrices already close to a rotation (say within 0.1 in Frobenius
    norm) and is idempotent on valid rotations.
    """
    m = np.asarray(m, dtype=float)
    if float(np.linalg.det(m)) <= 0.0:
        raise ValueError("matrix does not have positive determinant")
    eye = np.eye(3)
    for _ in range(4):
        m = m @ (1.5 * eye - 0.5 * (m.T @ m))
    return m


def is_rotation(m, tol: float = ROTATION_TOL) -> bool:
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        return False
    err = float(np.linalg.norm(m.T @ m - np.eye(3)))
    return err <= tol and abs(float(np.linalg.det(m)) - 1.0) <= tol


def check_rotation(m, tol: float = ROTATION_TOL) -> np.ndarray:
    """Return m as an ndarray after validating the rotation invariants."""
    m = np.asarray(m, dtype=float)
    if not is_rotation(m, tol):
        raise ValueError("not a rotation matrix within tolerance")
    return m


def rotation_to_json(m) -> dict:
    """Serialize as {"rotation": [9 floats]}, row-major."""
    m = check_rotation(m)
    return {"rotation": [float(x) for x in m.reshape(-1)]}


def rotation_from_json(obj) -> np.ndarray:
    vals = obj["rotation"]
    if len(vals) != 9:
        raise ValueError("rotation field must hold 9 numbers")
    return check_rotation(np.array(vals, dtype=float).reshape(3, 3))


def random_rotation(rng) -> np.ndarray:
    """Uniform random rotation via a normalized quaternion."""
    q = rng.standard_normal(4)
    q = q / np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])
