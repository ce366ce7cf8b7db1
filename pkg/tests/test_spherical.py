import math

import numpy as np
import numpy.testing as npt
import pytest

from spheredubins.errors import ChartPoleError
from spheredubins.sabban import integrate_frame
from spheredubins.spherical import (
    POLE_GUARD,
    SphericalConfig,
    SphericalParams,
    body_angular_velocity,
    config_from_degrees,
    config_to_degrees,
    from_rotation,
    geographic_frame,
    integrate,
    rhs,
    to_rotation,
    wrap_angle,
)

# solve_ivp (RK45, rtol 1e-13) endpoint for start (0.2, -1.0, 0.7),
# eta = 1, schedule [(+1.0, 1.2), (-0.25, 0.8)]; frozen
CHART_END = (-0.2531197254422123, 0.7697874185433583, 2.1374348660351417)


def test_wrap_angle():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3.0 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(0.3 - 2.0 * math.pi) == pytest.approx(0.3)


def test_config_wraps_and_guards():
    c = SphericalConfig(0.1, 7.0, -7.0)
    assert -math.pi < c.lon <= math.pi
    assert -math.pi < c.heading <= math.pi
    with pytest.raises(ChartPoleError):
        SphericalConfig(math.pi / 2.0, 0.0, 0.0)
    with pytest.raises(ChartPoleError):
        SphericalConfig(-math.pi / 2.0 + 1e-9, 0.0, 0.0)


def test_params_radius():
    p = SphericalParams(1.0)
    assert abs(p.turn_radius - 1.0 / math.sqrt(2.0)) < 1e-15
    assert p.u_max == 1.0
    p = SphericalParams(1.0 / math.sqrt(3.0))
    assert abs(p.turn_radius - 0.5) < 1e-15
    with pytest.raises(ValueError):
        SphericalParams(-1.0)


def test_rhs_rejects_large_steering():
    params = SphericalParams(1.0)
    c = SphericalConfig(0.1, 0.2, 0.3)
    with pytest.raises(ValueError):
        rhs(c, 1.5, params)


def test_rhs_heading_rate_sign():
    # positive steering turns the heading clockwise-positive in the chart
    params = SphericalParams(2.0)
    c = SphericalConfig(0.0, 0.0, 0.0)
    d = rhs(c, 1.0, params)
    assert d[0] == pytest.approx(1.0)  # due north at heading 0
    assert d[2] == pytest.approx(0.5)


def test_rotation_roundtrip():
    rng = np.random.default_rng(4)
    for _ in range(50):
        c = SphericalConfig(rng.uniform(-1.4, 1.4),
                            rng.uniform(-math.pi, math.pi),
                            rng.uniform(-math.pi, math.pi))
        back = from_rotation(to_rotation(c))
        assert abs(back.lat - c.lat) < 1e-12
        assert abs(wrap_angle(back.lon - c.lon)) < 1e-12
        assert abs(wrap_angle(back.heading - c.heading)) < 1e-12


def test_to_rotation_structure():
    c = SphericalConfig(0.4, -0.8, 1.1)
    g = to_rotation(c)
    npt.assert_allclose(g.T @ g, np.eye(3), atol=1e-14)
    assert np.linalg.det(g) > 0.0
    x = g[:, 0]
    npt.assert_allclose(x, [math.cos(c.lat) * math.cos(c.lon),
                            math.cos(c.lat) * math.sin(c.lon),
                            math.sin(c.lat)], atol=1e-15)
    npt.assert_allclose(np.cross(g[:, 0], g[:, 1]), g[:, 2], atol=1e-15)


def test_integrate_matches_reference_solver():
    c0 = SphericalConfig(0.2, -1.0, 0.7)
    params = SphericalParams(1.0)
    end = integrate(c0, [(1.0, 1.2), (-0.25, 0.8)], 2.0, params, step=1e-3)
    assert abs(end.lat - CHART_END[0]) < 1e-9
    assert abs(wrap_angle(end.lon - CHART_END[1])) < 1e-9
    assert abs(wrap_angle(end.heading - CHART_END[2])) < 1e-9


def test_integrate_agrees_with_frame():
    """Chart and frame integrations of one schedule must land on the
    same configuration (steering u maps to curvature -u/eta)."""
    rng = np.random.default_rng(12)
    params = SphericalParams(1.0)
    for _ in range(10):
        c0 = SphericalConfig(rng.uniform(-0.8, 0.8),
                             rng.uniform(-math.pi, math.pi),
                             rng.uniform(-math.pi, math.pi))
        schedule = [(float(rng.uniform(-1, 1)), float(rng.uniform(0.2, 1.0)))
                    for _ in range(2)]
        total = sum(l for _, l in schedule)
        try:
            c_end = integrate(c0, schedule, total, params, step=1e-3)
        except ChartPoleError:
            continue
        g_end = integrate_frame(to_rotation(c0),
                                [(-u, l) for u, l in schedule],
                                total, step=1e-3)
        f_end = from_rotation(g_end)
        assert abs(c_end.lat - f_end.lat) < 1e-8
        assert abs(wrap_angle(c_end.lon - f_end.lon)) < 1e-8
        assert abs(wrap_angle(c_end.heading - f_end.heading)) < 1e-8


def test_pole_breach_raises_with_location():
    c0 = SphericalConfig(1.45, 0.0, 0.0)  # heading 0 is due north
    params = SphericalParams(1.0)
    with pytest.raises(ChartPoleError) as err:
        integrate(c0, [(0.0, 0.5)], 0.5, params, step=1e-3)
    assert 0.0 < err.value.breach_s < 0.5


def test_degrees_roundtrip():
    c = SphericalConfig(0.3, -2.0, 2.5)
    obj = config_to_degrees(c)
    back = config_from_degrees(obj)
    assert abs(back.lat - c.lat) < 1e-15
    assert abs(back.lon - c.lon) < 1e-15
    assert abs(back.heading - c.heading) < 1e-15


def test_geographic_frame_columns():
    c = SphericalConfig(0.35, 1.2, -0.6)
    g = geographic_frame(c)
    x = to_rotation(c)[:, 0]
    npt.assert_allclose(g[:, 2], -x, atol=1e-14)
    # heading rotates the tangent within the (north, east) columns
    t = math.cos(c.heading) * g[:, 0] + math.sin(c.heading) * g[:, 1]
    npt.assert_allclose(to_rotation(c)[:, 1], t, atol=1e-14)


def test_body_angular_velocity_against_finite_differences():
    """The closed-form body angular velocity of the geographic frame
    chain must match a forward-difference of the chain itself."""
    rng = np.random.default_rng(99)
    h = 1e-6
    for _ in range(50):
        c = SphericalConfig(rng.uniform(-1.2, 1.2),
                            rng.uniform(-math.pi, math.pi),
                            rng.uniform(-math.pi, math.pi))
        dlat = float(rng.uniform(-1.0, 1.0))
        dlon = float(rng.uniform(-1.0, 1.0))
        g0 = geographic_frame(c)
        g1 = geographic_frame(SphericalConfig(c.lat + h * dlat,
                                              c.lon + h * dlon,
                                              c.heading))
        fd = g0.T @ ((g1 - g0) / h)
        npt.assert_allclose(body_angular_velocity(c, dlat, dlon), fd,
                            atol=1e-4)


def test_pole_guard_constant():
    assert POLE_GUARD < math.pi / 2.0
    assert math.pi / 2.0 - POLE_GUARD < 1e-5
