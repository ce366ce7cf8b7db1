"""Parity between the compiled kernels and the pure-Python fallback."""

import math
import os
import subprocess
import sys

import numpy as np
import numpy.testing as npt
import pytest

from spheredubins import _core_py

compiled = pytest.importorskip(
    "spheredubins._core", reason="compiled extension not built")

PAIR_TOL = 1e-12


def random_rotations(rng, n):
    from spheredubins.so3 import random_rotation
    return np.stack([random_rotation(rng) for _ in range(n)])


def test_rodrigues_parity():
    rng = np.random.default_rng(1)
    for _ in range(50):
        w = rng.uniform(-2, 2, size=3)
        s = float(rng.uniform(-4, 4))
        npt.assert_allclose(compiled.rodrigues(w, s),
                            _core_py.rodrigues(w, s), atol=PAIR_TOL)
    npt.assert_allclose(compiled.rodrigues(np.zeros(3), 1.0), np.eye(3),
                        atol=0.0)
    # tiny-angle series branch
    w = np.array([0.3, -0.4, 0.5])
    npt.assert_allclose(compiled.rodrigues(w, 1e-9),
                        _core_py.rodrigues(w, 1e-9), atol=1e-15)


def test_rk4_frame_parity():
    rng = np.random.default_rng(2)
    for _ in range(10):
        g0 = random_rotations(rng, 1)[0]
        u = float(rng.uniform(-2, 2))
        s_len = float(rng.uniform(0.1, 3.0))
        for renorm in (0, 16):
            a = compiled.rk4_frame(g0, u, s_len, 1e-3, renorm)
            b = _core_py.rk4_frame(g0, u, s_len, 1e-3, renorm)
            npt.assert_allclose(a, b, atol=PAIR_TOL)
    npt.assert_allclose(compiled.rk4_frame(np.eye(3), 1.0, 0.0, 1e-3, 0),
                        np.eye(3), atol=0.0)


def test_rk4_spherical_parity_and_breach():
    rng = np.random.default_rng(3)
    for _ in range(20):
        lat = float(rng.uniform(-1.0, 1.0))
        lon = float(rng.uniform(-3.0, 3.0))
        hdg = float(rng.uniform(-3.0, 3.0))
        u = float(rng.uniform(-1.0, 1.0))
        a = compiled.rk4_spherical(lat, lon, hdg, u, 1.0, 1.5, 1e-3)
        b = _core_py.rk4_spherical(lat, lon, hdg, u, 1.0, 1.5, 1e-3)
        npt.assert_allclose(a, b, atol=PAIR_TOL)
        assert (a[3] < 0) == (b[3] < 0)
    # forced pole breach reports the same arc length
    a = compiled.rk4_spherical(1.45, 0.0, 0.0, 0.0, 1.0, 1.0, 1e-3)
    b = _core_py.rk4_spherical(1.45, 0.0, 0.0, 0.0, 1.0, 1.0, 1e-3)
    assert a[3] > 0 and b[3] > 0
    assert abs(a[3] - b[3]) < 1e-15


def test_rk4_spherical_adjoint_parity():
    rng = np.random.default_rng(4)
    for _ in range(20):
        state = np.concatenate([
            rng.uniform(-1.0, 1.0, size=1),
            rng.uniform(-3.0, 3.0, size=2),
            rng.uniform(-1.0, 1.0, size=3),
        ])
        u = float(rng.choice([-1.0, 0.0, 1.0]))
        sa, ba = compiled.rk4_spherical_adjoint(state, u, 1.3, 1.2, 1e-3)
        sb, bb = _core_py.rk4_spherical_adjoint(state, u, 1.3, 1.2, 1e-3)
        npt.assert_allclose(sa, sb, atol=PAIR_TOL)
        assert (ba < 0) == (bb < 0)


def test_rk4_spherical_adjoint_dense_parity():
    state = np.array([0.1, 0.3, 0.5, 0.2, -0.3, 0.8])
    ra, ba = compiled.rk4_spherical_adjoint_dense(state, 1.0, 1.0, 0.5, 1e-3)
    rb, bb = _core_py.rk4_spherical_adjoint_dense(state, 1.0, 1.0, 0.5, 1e-3)
    assert ra.shape == rb.shape
    npt.assert_allclose(ra, rb, atol=PAIR_TOL)
    assert ba == bb


def test_rk4_costate_parity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        h = rng.uniform(-1, 1, size=3)
        kappa = float(rng.uniform(-2, 2))
        a = compiled.rk4_costate(h[0], h[1], h[2], kappa, 2.0, 1e-3)
        b = _core_py.rk4_costate(h[0], h[1], h[2], kappa, 2.0, 1e-3)
        npt.assert_allclose(a, b, atol=PAIR_TOL)


def test_exp_batch_parity():
    rng = np.random.default_rng(6)
    s = np.concatenate([[0.0, 1e-12, 1e-8], rng.uniform(-6, 6, size=40)])
    for _ in range(5):
        w = rng.uniform(-2, 2, size=3)
        npt.assert_allclose(compiled.exp_batch(w, s),
                            _core_py.exp_batch(w, s), atol=PAIR_TOL)
    npt.assert_allclose(compiled.exp_batch(np.zeros(3), s),
                        np.broadcast_to(np.eye(3), (len(s), 3, 3)),
                        atol=0.0)


def test_compose_and_rotvec_batch_parity():
    rng = np.random.default_rng(7)
    a = random_rotations(rng, 30)
    b = random_rotations(rng, 30)
    npt.assert_allclose(compiled.compose_batch(a, b),
                        _core_py.compose_batch(a, b), atol=PAIR_TOL)
    # mix in the awkward branches: identity, tiny, near-pi
    axis = np.array([1.0, 2.0, -1.0]) / math.sqrt(6.0)
    extra = np.stack([
        np.eye(3),
        _core_py.rodrigues(axis, 1e-10),
        _core_py.rodrigues(axis, math.pi - 1e-9),
        _core_py.rodrigues(axis, math.pi),
    ])
    batch = np.concatenate([a, extra])
    npt.assert_allclose(compiled.rotvec_batch(batch),
                        _core_py.rotvec_batch(batch), atol=PAIR_TOL)


def test_angle_to_batch_parity():
    rng = np.random.default_rng(8)
    r = random_rotations(rng, 40)
    t = random_rotations(rng, 1)[0]
    for target in (t, r[0]):
        a = compiled.angle_to_batch(r, target)
        b = _core_py.angle_to_batch(r, target)
        # the traces agree to machine precision; the angles themselves
        # can only agree to the arccos resolution floor near 0 and pi
        npt.assert_allclose(np.cos(a), np.cos(b), atol=PAIR_TOL)
        npt.assert_allclose(a, b, atol=3e-8)


def _backend_in_subprocess(value):
    env = dict(os.environ)
    if value is None:
        env.pop("SPHEREDUBINS_BACKEND", None)
    else:
        env["SPHEREDUBINS_BACKEND"] = value
    return subprocess.run(
        [sys.executable, "-c",
         "from spheredubins._backend import BACKEND; print(BACKEND)"],
        capture_output=True, text=True, env=env)


def test_backend_env_override():
    out = _backend_in_subprocess("python")
    assert out.returncode == 0 and out.stdout.strip() == "python"
    out = _backend_in_subprocess("cython")
    assert out.returncode == 0 and out.stdout.strip() == "cython"
    out = _backend_in_subprocess(None)
    assert out.returncode == 0 and out.stdout.strip() == "cython"
    out = _backend_in_subprocess("fortran")
    assert out.returncode != 0
    assert "SPHEREDUBINS_BACKEND" in out.stderr
