import math

import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import expm

from spheredubins.so3 import (
    AxisAngle,
    exp_rotation,
    log_rotation,
    orthonormalize,
    random_rotation,
    rotation_distance,
    rotation_from_json,
    rotation_to_json,
    skew,
)


def test_skew_antisymmetric():
    v = np.array([0.3, -1.2, 2.0])
    m = skew(v)
    npt.assert_allclose(m, -m.T, atol=0.0)
    npt.assert_allclose(m @ np.array([1.0, 0.5, -2.0]),
                        np.cross(v, [1.0, 0.5, -2.0]), atol=1e-15)


def test_exp_identity_for_zero():
    npt.assert_allclose(exp_rotation(np.zeros(3)), np.eye(3), atol=0.0)


@pytest.mark.parametrize("scale", [1e-9, 1e-7, 0.1, 1.0, 3.0])
def test_exp_matches_expm(scale):
    rng = np.random.default_rng(1234)
    for _ in range(20):
        w = rng.normal(size=3) * scale
        npt.assert_allclose(exp_rotation(w), expm(skew(w)),
                            atol=1e-13, rtol=0.0)


def test_exp_with_arc_length_argument():
    w = np.array([0.4, -0.1, 0.9])
    npt.assert_allclose(exp_rotation(w, 2.5), exp_rotation(2.5 * w),
                        atol=1e-14)


def test_exp_is_orthogonal():
    rng = np.random.default_rng(5)
    for _ in range(50):
        g = exp_rotation(rng.normal(size=3) * rng.uniform(0, 6))
        npt.assert_allclose(g.T @ g, np.eye(3), atol=1e-13)
        assert np.linalg.det(g) > 0.9


def test_log_roundtrip_generic():
    rng = np.random.default_rng(77)
    for _ in range(100):
        w = rng.normal(size=3)
        w *= rng.uniform(0.0, math.pi - 1e-3) / np.linalg.norm(w)
        res = log_rotation(exp_rotation(w))
        npt.assert_allclose(res.axis * res.angle, w, atol=1e-10)


def test_log_near_pi():
    rng = np.random.default_rng(8)
    for _ in range(50):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = math.pi - 10.0 ** rng.uniform(-12, -4)
        res = log_rotation(exp_rotation(axis * angle))
        npt.assert_allclose(res.angle, angle, atol=1e-8)
        npt.assert_allclose(res.axis * res.angle, axis * angle, atol=1e-6)


def test_log_at_exact_pi():
    axis = np.array([1.0, 2.0, -0.5])
    axis /= np.linalg.norm(axis)
    res = log_rotation(exp_rotation(axis * math.pi))
    assert abs(res.angle - math.pi) < 1e-12
    # axis sign is ambiguous at pi
    assert min(np.linalg.norm(res.axis - axis),
               np.linalg.norm(res.axis + axis)) < 1e-8


def test_log_identity():
    res = log_rotation(np.eye(3))
    assert isinstance(res, AxisAngle)
    assert res.angle == 0.0


def test_rotation_distance_properties():
    rng = np.random.default_rng(3)
    a = random_rotation(rng)
    b = random_rotation(rng)
    assert rotation_distance(a, a) < 1e-12
    assert abs(rotation_distance(a, b) - rotation_distance(b, a)) < 1e-12
    w = np.array([0.0, 0.0, 1.3])
    assert abs(rotation_distance(np.eye(3), exp_rotation(w)) - 1.3) < 1e-12


def test_orthonormalize_recovers_perturbation():
    rng = np.random.default_rng(21)
    g = random_rotation(rng)
    noisy = g + 1e-6 * rng.normal(size=(3, 3))
    fixed = orthonormalize(noisy)
    npt.assert_allclose(fixed.T @ fixed, np.eye(3), atol=1e-12)
    assert rotation_distance(fixed, g) < 1e-5


def test_orthonormalize_rejects_reflection():
    with pytest.raises(ValueError):
        orthonormalize(np.diag([1.0, 1.0, -1.0]))


def test_json_roundtrip():
    rng = np.random.default_rng(9)
    g = random_rotation(rng)
    obj = rotation_to_json(g)
    assert set(obj) == {"rotation"}
    assert len(obj["rotation"]) == 9
    npt.assert_allclose(rotation_from_json(obj), g, atol=1e-15)


def test_random_rotation_is_rotation():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_rotation(rng)
        npt.assert_allclose(g.T @ g, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(g) - 1.0) < 1e-12
