# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirrors spheredubins._core_py exactly."""

from libc.math cimport sin, cos, sqrt, atan2, acos, fabs, fmod, ceil

import numpy as np


cdef double PI = 3.141592653589793238462643383279502884
cdef double POLE_GUARD_C = PI / 2.0 - 1e-6
cdef double _EXP_SMALL = 1e-6
cdef double _LOG_SMALL = 1e-7

POLE_GUARD = POLE_GUARD_C


cdef inline double _safe_cos(double x) nogil:
    cdef double c = cos(x)
    if -1e-9 < c < 1e-9:
        return 1e-9 if c >= 0.0 else -1e-9
    return c


cdef inline double _wrap_pi_c(double x) nogil:
    cdef double y = fmod(x + PI, 2.0 * PI)
    if y <= 0.0:
        y += 2.0 * PI
    return y - PI


cdef void _rodrigues_c(double wx, double wy, double wz, double s,
                       double* out) nogil:
    cdef double n = sqrt(wx * wx + wy * wy + wz * wz)
    cdef double th = s * n
    cdef double kx, ky, kz, sn, v, c, t2, hh
    if n == 0.0 or th == 0.0:
        out[0] = 1.0; out[1] = 0.0; out[2] = 0.0
        out[3] = 0.0; out[4] = 1.0; out[5] = 0.0
        out[6] = 0.0; out[7] = 0.0; out[8] = 1.0
        return
    kx = wx / n; ky = wy / n; kz = wz / n
    if fabs(th) < _EXP_SMALL:
        t2 = th * th
        sn = th * (1.0 - t2 / 6.0)
        v = 0.5 * t2 * (1.0 - t2 / 12.0)
    else:
        sn = sin(th)
        hh = sin(0.5 * th)
        v = 2.0 * hh * hh
    c = 1.0 - v
    out[0] = c + v * kx * kx
    out[1] = v * kx * ky - sn * kz
    out[2] = v * kx * kz + sn * ky
    out[3] = v * ky * kx + sn * kz
    out[4] = c + v * ky * ky
    out[5] = v * ky * kz - sn * kx
    out[6] = v * kz * kx - sn * ky
    out[7] = v * kz * ky + sn * kx
    out[8] = c + v * kz * kz


def rodrigues(omega, double s):
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    out = np.empty((3, 3))
    cdef double[:, ::1] o = out
    _rodrigues_c(w[0], w[1], w[2], s, &o[0, 0])
    return out


cdef void _polar3_c(double* m) nogil:
    cdef double g[9]
    cdef double t[9]
    cdef int it, i, j, k
    cdef double acc
    for it in range(4):
        # t = m^T m
        for i in range(3):
            for j in range(3):
                acc = 0.0
                for k in range(3):
                    acc += m[3 * k + i] * m[3 * k + j]
                t[3 * i + j] = acc
        # t = 1.5 I - 0.5 t
        for i in range(9):
            t[i] = -0.5 * t[i]
        t[0] += 1.5; t[4] += 1.5; t[8] += 1.5
        # g = m t
        for i in range(3):
            for j in range(3):
                acc = 0.0
                for k in range(3):
                    acc += m[3 * i + k] * t[3 * k + j]
                g[3 * i + j] = acc
        for i in range(9):
            m[i] = g[i]


def rk4_frame(g0, double u, double s_len, double step, int renorm_every):
    g_arr = np.array(g0, dtype=np.float64, order="C")
    cdef double[:, ::1] gv = g_arr
    if s_len <= 0.0:
        return g_arr
    cdef int n = <int>ceil(s_len / step - 1e-12)
    if n < 1:
        n = 1
    cdef double h = s_len / n
    cdef double a = gv[0, 0], b = gv[0, 1], c = gv[0, 2]
    cdef double d = gv[1, 0], e = gv[1, 1], f = gv[1, 2]
    cdef double p = gv[2, 0], q = gv[2, 1], r = gv[2, 2]
    cdef double k1a, k1b, k1c, k1d, k1e, k1f, k1p, k1q, k1r
    cdef double k2a, k2b, k2c, k2d, k2e, k2f, k2p, k2q, k2r
    cdef double k3a, k3b, k3c, k3d, k3e, k3f, k3p, k3q, k3r
    cdef double k4a, k4b, k4c, k4d, k4e, k4f, k4p, k4q, k4r
    cdef double a2, b2, c2, d2, e2, f2, p2, q2, r2
    cdef double a3, b3, c3, d3, e3, f3, p3, q3, r3
    cdef double a4, b4, c4, d4, e4, f4, p4, q4, r4
    cdef double w
    cdef double buf[9]
    cdef int i
    with nogil:
        for i in range(n):
            k1a = b; k1b = -a + u * c; k1c = -u * b
            k1d = e; k1e = -d + u * f; k1f = -u * e
            k1p = q; k1q = -p + u * r; k1r = -u * q

            a2 = a + 0.5 * h * k1a; b2 = b + 0.5 * h * k1b; c2 = c + 0.5 * h * k1c
            d2 = d + 0.5 * h * k1d; e2 = e + 0.5 * h * k1e; f2 = f + 0.5 * h * k1f
            p2 = p + 0.5 * h * k1p; q2 = q + 0.5 * h * k1q; r2 = r + 0.5 * h * k1r
            k2a = b2; k2b = -a2 + u * c2; k2c = -u * b2
            k2d = e2; k2e = -d2 + u * f2; k2f = -u * e2
            k2p = q2; k2q = -p2 + u * r2; k2r = -u * q2

            a3 = a + 0.5 * h * k2a; b3 = b + 0.5 * h * k2b; c3 = c + 0.5 * h * k2c
            d3 = d + 0.5 * h * k2d; e3 = e + 0.5 * h * k2e; f3 = f + 0.5 * h * k2f
            p3 = p + 0.5 * h * k2p; q3 = q + 0.5 * h * k2q; r3 = r + 0.5 * h * k2r
            k3a = b3; k3b = -a3 + u * c3; k3c = -u * b3
            k3d = e3; k3e = -d3 + u * f3; k3f = -u * e3
            k3p = q3; k3q = -p3 + u * r3; k3r = -u * q3

            a4 = a + h * k3a; b4 = b + h * k3b; c4 = c + h * k3c
            d4 = d + h * k3d; e4 = e + h * k3e; f4 = f + h * k3f
            p4 = p + h * k3p; q4 = q + h * k3q; r4 = r + h * k3r
            k4a = b4; k4b = -a4 + u * c4; k4c = -u * b4
            k4d = e4; k4e = -d4 + u * f4; k4f = -u * e4
            k4p = q4; k4q = -p4 + u * r4; k4r = -u * q4

            w = h / 6.0
            a += w * (k1a + 2 * k2a + 2 * k3a + k4a)
            b += w * (k1b + 2 * k2b + 2 * k3b + k4b)
            c += w * (k1c + 2 * k2c + 2 * k3c + k4c)
            d += w * (k1d + 2 * k2d + 2 * k3d + k4d)
            e += w * (k1e + 2 * k2e + 2 * k3e + k4e)
            f += w * (k1f + 2 * k2f + 2 * k3f + k4f)
            p += w * (k1p + 2 * k2p + 2 * k3p + k4p)
            q += w * (k1q + 2 * k2q + 2 * k3q + k4q)
            r += w * (k1r + 2 * k2r + 2 * k3r + k4r)

            if renorm_every > 0 and (i + 1) % renorm_every == 0:
                buf[0] = a; buf[1] = b; buf[2] = c
                buf[3] = d; buf[4] = e; buf[5] = f
                buf[6] = p; buf[7] = q; buf[8] = r
                _polar3_c(buf)
                a = buf[0]; b = buf[1]; c = buf[2]
                d = buf[3]; e = buf[4]; f = buf[5]
                p = buf[6]; q = buf[7]; r = buf[8]
    gv[0, 0] = a; gv[0, 1] = b; gv[0, 2] = c
    gv[1, 0] = d; gv[1, 1] = e; gv[1, 2] = f
    gv[2, 0] = p; gv[2, 1] = q; gv[2, 2] = r
    return g_arr


def rk4_spherical(double lat, double lon, double hdg, double u, double eta,
                  double s_len, double step):
    if s_len <= 0.0:
        return lat, lon, hdg, -1.0
    cdef double ui = u / eta
    cdef int n = <int>ceil(s_len / step - 1e-12)
    if n < 1:
        n = 1
    cdef double h = s_len / n
    cdef double L = lat, l = lon, p = hdg
    cdef double cl, sl, sp, cp, w
    cdef double k1L, k1l, k1p, k2L, k2l, k2p, k3L, k3l, k3p, k4L, k4l, k4p
    cdef double L2, p2, L3, p3, L4, p4
    cdef double breach = -1.0
    cdef int i
    with nogil:
        for i in range(n):
            cl = _safe_cos(L); sl = sin(L); sp = sin(p); cp = cos(p)
            k1L = cp; k1l = sp / cl; k1p = (sl / cl) * sp + ui

            L2 = L + 0.5 * h * k1L; p2 = p + 0.5 * h * k1p
            cl = _safe_cos(L2); sl = sin(L2); sp = sin(p2); cp = cos(p2)
            k2L = cp; k2l = sp / cl; k2p = (sl / cl) * sp + ui

            L3 = L + 0.5 * h * k2L; p3 = p + 0.5 * h * k2p
            cl = _safe_cos(L3); sl = sin(L3); sp = sin(p3); cp = cos(p3)
            k3L = cp; k3l = sp / cl; k3p = (sl / cl) * sp + ui

            L4 = L + h * k3L; p4 = p + h * k3p
            cl = _safe_cos(L4); sl = sin(L4); sp = sin(p4); cp = cos(p4)
            k4L = cp; k4l = sp / cl; k4p = (sl / cl) * sp + ui

            w = h / 6.0
            L += w * (k1L + 2 * k2L + 2 * k3L + k4L)
            l += w * (k1l + 2 * k2l + 2 * k3l + k4l)
            p += w * (k1p + 2 * k2p + 2 * k3p + k4p)
            l = _wrap_pi_c(l)
            if L > POLE_GUARD_C or L < -POLE_GUARD_C:
                breach = (i + 1) * h
                break
    return L, l, p, breach


cdef void _chart_adj_rhs(double L, double l, double p, double lL, double ll,
                         double lp, double ui, double* d) nogil:
    cdef double cl = _safe_cos(L)
    cdef double sl = sin(L)
    cdef double sp = sin(p)
    cdef double cp = cos(p)
    cdef double t = sl / cl
    d[0] = cp
    d[1] = sp / cl
    d[2] = t * sp + ui
    d[3] = -ll * sp * sl / (cl * cl) - lp * sp / (cl * cl)
    d[4] = 0.0
    d[5] = lL * sp - ll * cp / cl - lp * t * cp


cdef int _adjoint_steps(double* st, double ui, double h, int n,
                        double[:, ::1] rows, bint dense,
                        double* breach) nogil:
    """Advance n RK4 steps; fill rows when dense.  Returns steps taken."""
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double y2[6]
    cdef double w
    cdef int i, j
    breach[0] = -1.0
    for i in range(n):
        _chart_adj_rhs(st[0], st[1], st[2], st[3], st[4], st[5], ui, k1)
        for j in range(6):
            y2[j] = st[j] + 0.5 * h * k1[j]
        _chart_adj_rhs(y2[0], y2[1], y2[2], y2[3], y2[4], y2[5], ui, k2)
        for j in range(6):
            y2[j] = st[j] + 0.5 * h * k2[j]
        _chart_adj_rhs(y2[0], y2[1], y2[2], y2[3], y2[4], y2[5], ui, k3)
        for j in range(6):
            y2[j] = st[j] + h * k3[j]
        _chart_adj_rhs(y2[0], y2[1], y2[2], y2[3], y2[4], y2[5], ui, k4)
        w = h / 6.0
        for j in range(6):
            st[j] += w * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j])
        st[1] = _wrap_pi_c(st[1])
        if dense:
            rows[i + 1, 0] = (i + 1) * h
            for j in range(6):
                rows[i + 1, j + 1] = st[j]
        if st[0] > POLE_GUARD_C or st[0] < -POLE_GUARD_C:
            breach[0] = (i + 1) * h
            return i + 1
    return n


def rk4_spherical_adjoint(state, double u, double eta, double s_len,
                          double step):
    cdef double[::1] sv = np.ascontiguousarray(state, dtype=np.float64)
    cdef double st[6]
    cdef int j
    for j in range(6):
        st[j] = sv[j]
    out = np.empty(6)
    cdef double[::1] ov = out
    if s_len <= 0.0:
        for j in range(6):
            ov[j] = st[j]
        return out, -1.0
    cdef double ui = u / eta
    cdef int n = <int>ceil(s_len / step - 1e-12)
    if n < 1:
        n = 1
    cdef double h = s_len / n
    cdef double breach
    cdef double[:, ::1] dummy = np.empty((1, 7))
    _adjoint_steps(st, ui, h, n, dummy, 0, &breach)
    for j in range(6):
        ov[j] = st[j]
    return out, breach


def rk4_spherical_adjoint_dense(state, double u, double eta, double s_len,
                                double step):
    cdef double[::1] sv = np.ascontiguousarray(state, dtype=np.float64)
    cdef double st[6]
    cdef int j
    for j in range(6):
        st[j] = sv[j]
    if s_len <= 0.0:
        rows0 = np.empty((1, 7))
        rows0[0, 0] = 0.0
        for j in range(6):
            rows0[0, j + 1] = st[j]
        return rows0, -1.0
    cdef double ui = u / eta
    cdef int n = <int>ceil(s_len / step - 1e-12)
    if n < 1:
        n = 1
    cdef double h = s_len / n
    rows = np.empty((n + 1, 7))
    cdef double[:, ::1] rv = rows
    rv[0, 0] = 0.0
    for j in range(6):
        rv[0, j + 1] = st[j]
    cdef double breach
    cdef int taken = _adjoint_steps(st, ui, h, n, rv, 1, &breach)
    if taken < n:
        rows = rows[: taken + 1]
    return rows, breach


def rk4_costate(double h1, double h2, double h12, double kappa, double s_len,
                double step):
    if s_len <= 0.0:
        return h1, h2, h12
    cdef int n = <int>ceil(s_len / step - 1e-12)
    if n < 1:
        n = 1
    cdef double h = s_len / n
    cdef double k = kappa
    cdef double a = h1, b = h2, c = h12
    cdef double k1a, k1b, k1c, k2a, k2b, k2c, k3a, k3b, k3c, k4a, k4b, k4c
    cdef double a2, b2, c2, a3, b3, c3, a4, b4, c4, w
    cdef int i
    with nogil:
        for i in range(n):
            k1a = -k * b; k1b = c + k * a; k1c = -b
            a2 = a + 0.5 * h * k1a; b2 = b + 0.5 * h * k1b; c2 = c + 0.5 * h * k1c
            k2a = -k * b2; k2b = c2 + k * a2; k2c = -b2
            a3 = a + 0.5 * h * k2a; b3 = b + 0.5 * h * k2b; c3 = c + 0.5 * h * k2c
            k3a = -k * b3; k3b = c3 + k * a3; k3c = -b3
            a4 = a + h * k3a; b4 = b + h * k3b; c4 = c + h * k3c
            k4a = -k * b4; k4b = c4 + k * a4; k4c = -b4
            w = h / 6.0
            a += w * (k1a + 2 * k2a + 2 * k3a + k4a)
            b += w * (k1b + 2 * k2b + 2 * k3b + k4b)
            c += w * (k1c + 2 * k2c + 2 * k3c + k4c)
    return a, b, c


# ---------------------------------------------------------------- batch ----

def exp_batch(omega, s):
    cdef double[::1] w = np.ascontiguousarray(omega, dtype=np.float64)
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef Py_ssize_t n_rows = sv.shape[0]
    out = np.empty((n_rows, 3, 3))
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n_rows):
            _rodrigues_c(w[0], w[1], w[2], sv[i], &ov[i, 0, 0])
    return out


def compose_batch(a, b):
    cdef double[:, :, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, :, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n_rows = av.shape[0]
    out = np.empty((n_rows, 3, 3))
    cdef double[:, :, ::1] ov = out
    cdef Py_ssize_t m
    cdef int i, j, k
    cdef double acc
    with nogil:
        for m in range(n_rows):
            for i in range(3):
                for j in range(3):
                    acc = 0.0
                    for k in range(3):
                        acc += av[m, i, k] * bv[m, k, j]
                    ov[m, i, j] = acc
    return out


def rotvec_batch(r):
    cdef double[:, :, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef Py_ssize_t n_rows = rv.shape[0]
    out = np.empty((n_rows, 3))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t m
    cdef double wx, wy, wz, wn, tr, theta, fac
    cdef double b00, b11, b22, ax, ay, az, nn, dot
    cdef int j
    with nogil:
        for m in range(n_rows):
            wx = rv[m, 2, 1] - rv[m, 1, 2]
            wy = rv[m, 0, 2] - rv[m, 2, 0]
            wz = rv[m, 1, 0] - rv[m, 0, 1]
            wn = sqrt(wx * wx + wy * wy + wz * wz)
            tr = rv[m, 0, 0] + rv[m, 1, 1] + rv[m, 2, 2]
            theta = atan2(wn, tr - 1.0)
            if theta < _LOG_SMALL:
                fac = 0.5 * (1.0 + theta * theta / 6.0)
                ov[m, 0] = fac * wx
                ov[m, 1] = fac * wy
                ov[m, 2] = fac * wz
            elif theta > PI - 1e-5:
                b00 = 0.5 * (rv[m, 0, 0] + 1.0)
                b11 = 0.5 * (rv[m, 1, 1] + 1.0)
                b22 = 0.5 * (rv[m, 2, 2] + 1.0)
                if b00 >= b11 and b00 >= b22:
                    j = 0
                elif b11 >= b22:
                    j = 1
                else:
                    j = 2
                # column of (sym(R) + I)/2; symmetrizing drops the
                # O(pi - theta) sin-term contamination
                ax = 0.25 * (rv[m, 0, j] + rv[m, j, 0]) + (0.5 if j == 0 else 0.0)
                ay = 0.25 * (rv[m, 1, j] + rv[m, j, 1]) + (0.5 if j == 1 else 0.0)
                az = 0.25 * (rv[m, 2, j] + rv[m, j, 2]) + (0.5 if j == 2 else 0.0)
                nn = sqrt(ax * ax + ay * ay + az * az)
                if nn < 1e-300:
                    nn = 1e-300
                ax /= nn; ay /= nn; az /= nn
                dot = wx * ax + wy * ay + wz * az
                if dot < 0.0:
                    ax = -ax; ay = -ay; az = -az
                ov[m, 0] = theta * ax
                ov[m, 1] = theta * ay
                ov[m, 2] = theta * az
            else:
                fac = theta / wn
                ov[m, 0] = fac * wx
                ov[m, 1] = fac * wy
                ov[m, 2] = fac * wz
    return out


def angle_to_batch(r, target):
    cdef double[:, :, ::1] rv = np.ascontiguousarray(r, dtype=np.float64)
    cdef double[:, ::1] tv = np.ascontiguousarray(target, dtype=np.float64)
    cdef Py_ssize_t n_rows = rv.shape[0]
    out = np.empty(n_rows)
    cdef double[::1] ov = out
    cdef Py_ssize_t m
    cdef int i, j
    cdef double acc
    with nogil:
        for m in range(n_rows):
            acc = 0.0
            for i in range(3):
                for j in range(3):
                    acc += rv[m, i, j] * tv[i, j]
            acc = 0.5 * (acc - 1.0)
            if acc > 1.0:
                acc = 1.0
            elif acc < -1.0:
                acc = -1.0
            ov[m] = acos(acc)
    return out
