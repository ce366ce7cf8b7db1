"""Pure-Python kernels.

Same call surface as the compiled extension ``spheredubins._core``; the
scalar integrators run on plain floats (math module), the batch helpers
on vectorized numpy.  Branch thresholds are kept identical in the two
backends so results agree to roundoff.
"""

import math

import numpy as np

POLE_GUARD = math.pi / 2.0 - 1e-6

_EXP_SMALL = 1e-6
_LOG_SMALL = 1e-7
_LOG_NEAR_PI = math.pi - 1e-5


def _safe_cos(x):
    # keep 1/cos finite when an RK stage pokes past the pole
    c = math.cos(x)
    if -1e-9 < c < 1e-9:
        return 1e-9 if c >= 0.0 else -1e-9
    return c


def rodrigues(omega, s):
    """exp(s * skew(omega)) as a 3x3 array."""
    wx = float(omega[0])
    wy = float(omega[1])
    wz = float(omega[2])
    n = math.sqrt(wx * wx + wy * wy + wz * wz)
    out = np.empty((3, 3))
    th = s * n
    if n == 0.0 or th == 0.0:
        out[:] = np.eye(3)
        return out
    kx = wx / n
    ky = wy / n
    kz = wz / n
    if abs(th) < _EXP_SMALL:
        t2 = th * th
        sn = th * (1.0 - t2 / 6.0)
        v = 0.5 * t2 * (1.0 - t2 / 12.0)
    else:
        sn = math.sin(th)
        h = math.sin(0.5 * th)
        v = 2.0 * h * h
    c = 1.0 - v
    out[0, 0] = c + v * kx * kx
    out[0, 1] = v * kx * ky - sn * kz
    out[0, 2] = v * kx * kz + sn * ky
    out[1, 0] = v * ky * kx + sn * kz
    out[1, 1] = c + v * ky * ky
    out[1, 2] = v * ky * kz - sn * kx
    out[2, 0] = v * kz * kx - sn * ky
    out[2, 1] = v * kz * ky + sn * kx
    out[2, 2] = c + v * kz * kz
    return out


def _polar3(m):
    # Newton iteration toward the orthogonal polar factor
    for _ in range(4):
        m = m @ (1.5 * np.eye(3) - 0.5 * (m.T @ m))
    return m


def rk4_frame(g0, u, s_len, step, renorm_every):
    """Integrate dg/ds = g * skew((u, 0, 1)) with classic RK4."""
    g = np.array(g0, dtype=float)
    if s_len <= 0.0:
        return g
    n = max(1, int(math.ceil(s_len / step - 1e-12)))
    h = s_len / n
    a, b, c = g[0]
    d, e, f = g[1]
    p, q, r = g[2]
    for i in range(n):
        # each row (x, t, nn) obeys x' = t, t' = -x + u*nn, nn' = -u*t
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
            g[0, 0] = a; g[0, 1] = b; g[0, 2] = c
            g[1, 0] = d; g[1, 1] = e; g[1, 2] = f
            g[2, 0] = p; g[2, 1] = q; g[2, 2] = r
            g = _polar3(g)
            a, b, c = g[0]
            d, e, f = g[1]
            p, q, r = g[2]
    g[0, 0] = a; g[0, 1] = b; g[0, 2] = c
    g[1, 0] = d; g[1, 1] = e; g[1, 2] = f
    g[2, 0] = p; g[2, 1] = q; g[2, 2] = r
    return g


def _wrap_pi(x):
    """Wrap an angle to (-pi, pi]."""
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y <= 0.0:
        y += 2.0 * math.pi
    return y - math.pi


def rk4_spherical(lat, lon, hdg, u, eta, s_len, step):
    """RK4 on the latitude/longitude/heading chart.

    Returns (lat, lon, hdg, breach_s); breach_s is negative when the
    trajectory stayed inside the pole guard band, otherwise the arc
    length at the end of the offending step.
    """
    if s_len <= 0.0:
        return lat, lon, hdg, -1.0
    ui = u / eta
    n = max(1, int(math.ceil(s_len / step - 1e-12)))
    h = s_len / n
    L, l, p = lat, lon, hdg
    for i in range(n):
        cl = _safe_cos(L); sl = math.sin(L); sp = math.sin(p); cp = math.cos(p)
        k1L = cp; k1l = sp / cl; k1p = (sl / cl) * sp + ui

        L2 = L + 0.5 * h * k1L; p2 = p + 0.5 * h * k1p
        cl = _safe_cos(L2); sl = math.sin(L2); sp = math.sin(p2); cp = math.cos(p2)
        k2L = cp; k2l = sp / cl; k2p = (sl / cl) * sp + ui

        L3 = L + 0.5 * h * k2L; p3 = p + 0.5 * h * k2p
        cl = _safe_cos(L3); sl = math.sin(L3); sp = math.sin(p3); cp = math.cos(p3)
        k3L = cp; k3l = sp / cl; k3p = (sl / cl) * sp + ui

        L4 = L + h * k3L; p4 = p + h * k3p
        cl = _safe_cos(L4); sl = math.sin(L4); sp = math.sin(p4); cp = math.cos(p4)
        k4L = cp; k4l = sp / cl; k4p = (sl / cl) * sp + ui

        w = h / 6.0
        L += w * (k1L + 2 * k2L + 2 * k3L + k4L)
        l += w * (k1l + 2 * k2l + 2 * k3l + k4l)
        p += w * (k1p + 2 * k2p + 2 * k3p + k4p)
        l = _wrap_pi(l)
        if L > POLE_GUARD or L < -POLE_GUARD:
            return L, l, p, (i + 1) * h
    return L, l, p, -1.0


def _chart_adjoint_rhs(L, l, p, lL, ll, lp, ui):
    cl = _safe_cos(L)
    sl = math.sin(L)
    sp = math.sin(p)
    cp = math.cos(p)
    t = sl / cl
    dL = cp
    dl = sp / cl
    dp = t * sp + ui
    dlL = -ll * sp * sl / (cl * cl) - lp * sp / (cl * cl)
    dlp = lL * sp - ll * cp / cl - lp * t * cp
    return dL, dl, dp, dlL, 0.0, dlp


def rk4_spherical_adjoint(state, u, eta, s_len, step):
    """Co-integrate chart state and its costate; costate of lon is conserved."""
    L, l, p, lL, ll, lp = (float(x) for x in state)
    if s_len <= 0.0:
        return np.array([L, l, p, lL, ll, lp]), -1.0
    ui = u / eta
    n = max(1, int(math.ceil(s_len / step - 1e-12)))
    h = s_len / n
    breach = -1.0
    for i in range(n):
        k1 = _chart_adjoint_rhs(L, l, p, lL, ll, lp, ui)
        k2 = _chart_adjoint_rhs(L + 0.5 * h * k1[0], l + 0.5 * h * k1[1],
                                p + 0.5 * h * k1[2], lL + 0.5 * h * k1[3],
                                ll, lp + 0.5 * h * k1[5], ui)
        k3 = _chart_adjoint_rhs(L + 0.5 * h * k2[0], l + 0.5 * h * k2[1],
                                p + 0.5 * h * k2[2], lL + 0.5 * h * k2[3],
                                ll, lp + 0.5 * h * k2[5], ui)
        k4 = _chart_adjoint_rhs(L + h * k3[0], l + h * k3[1], p + h * k3[2],
                                lL + h * k3[3], ll, lp + h * k3[5], ui)
        w = h / 6.0
        L += w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        l += w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        p += w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        lL += w * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
        lp += w * (k1[5] + 2 * k2[5] + 2 * k3[5] + k4[5])
        l = _wrap_pi(l)
        if L > POLE_GUARD or L < -POLE_GUARD:
            breach = (i + 1) * h
            break
    return np.array([L, l, p, lL, ll, lp]), breach


def rk4_spherical_adjoint_dense(state, u, eta, s_len, step):
    """Like rk4_spherical_adjoint but records every step.

    Returns (rows, breach_s) where rows[k] = (s, lat, lon, hdg, lam_lat,
    lam_lon, lam_hdg).  On a pole breach the rows stop at the offending
    step.
    """
    L, l, p, lL, ll, lp = (float(x) for x in state)
    rows = [(0.0, L, l, p, lL, ll, lp)]
    if s_len <= 0.0:
        return np.array(rows), -1.0
    ui = u / eta
    n = max(1, int(math.ceil(s_len / step - 1e-12)))
    h = s_len / n
    breach = -1.0
    for i in range(n):
        k1 = _chart_adjoint_rhs(L, l, p, lL, ll, lp, ui)
        k2 = _chart_adjoint_rhs(L + 0.5 * h * k1[0], l + 0.5 * h * k1[1],
                                p + 0.5 * h * k1[2], lL + 0.5 * h * k1[3],
                                ll, lp + 0.5 * h * k1[5], ui)
        k3 = _chart_adjoint_rhs(L + 0.5 * h * k2[0], l + 0.5 * h * k2[1],
                                p + 0.5 * h * k2[2], lL + 0.5 * h * k2[3],
                                ll, lp + 0.5 * h * k2[5], ui)
        k4 = _chart_adjoint_rhs(L + h * k3[0], l + h * k3[1], p + h * k3[2],
                                lL + h * k3[3], ll, lp + h * k3[5], ui)
        w = h / 6.0
        L += w * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        l += w * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        p += w * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        lL += w * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
        lp += w * (k1[5] + 2 * k2[5] + 2 * k3[5] + k4[5])
        l = _wrap_pi(l)
        rows.append(((i + 1) * h, L, l, p, lL, ll, lp))
        if L > POLE_GUARD or L < -POLE_GUARD:
            breach = (i + 1) * h
            break
    return np.array(rows), breach


def rk4_costate(h1, h2, h12, kappa, s_len, step):
    """RK4 on the frame costate: h1' = -k h2, h2' = h12 + k h1, h12' = -h2."""
    if s_len <= 0.0:
        return h1, h2, h12
    n = max(1, int(math.ceil(s_len / step - 1e-12)))
    h = s_len / n
    k = kappa
    a, b, c = h1, h2, h12
    for _ in range(n):
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
    """exp(s_i * skew(omega)) for a shared axis and a vector of lengths."""
    s = np.asarray(s, dtype=float)
    n_rows = s.shape[0]
    out = np.empty((n_rows, 3, 3))
    wx, wy, wz = float(omega[0]), float(omega[1]), float(omega[2])
    nrm = math.sqrt(wx * wx + wy * wy + wz * wz)
    if nrm == 0.0:
        out[:] = np.eye(3)
        return out
    kx, ky, kz = wx / nrm, wy / nrm, wz / nrm
    th = s * nrm
    small = np.abs(th) < _EXP_SMALL
    t2 = th * th
    sn = np.where(small, th * (1.0 - t2 / 6.0), np.sin(th))
    hh = np.sin(0.5 * th)
    v = np.where(small, 0.5 * t2 * (1.0 - t2 / 12.0), 2.0 * hh * hh)
    c = 1.0 - v
    out[:, 0, 0] = c + v * kx * kx
    out[:, 0, 1] = v * kx * ky - sn * kz
    out[:, 0, 2] = v * kx * kz + sn * ky
    out[:, 1, 0] = v * ky * kx + sn * kz
    out[:, 1, 1] = c + v * ky * ky
    out[:, 1, 2] = v * ky * kz - sn * kx
    out[:, 2, 0] = v * kz * kx - sn * ky
    out[:, 2, 1] = v * kz * ky + sn * kx
    out[:, 2, 2] = c + v * kz * kz
    return out


def compose_batch(a, b):
    return np.matmul(a, b)


def rotvec_batch(r):
    """Rotation vector (axis * angle) of each matrix in a batch."""
    r = np.asarray(r, dtype=float)
    w = np.stack([r[:, 2, 1] - r[:, 1, 2],
                  r[:, 0, 2] - r[:, 2, 0],
                  r[:, 1, 0] - r[:, 0, 1]], axis=1)
    wn = np.sqrt(np.sum(w * w, axis=1))
    tr = r[:, 0, 0] + r[:, 1, 1] + r[:, 2, 2]
    theta = np.arctan2(wn, tr - 1.0)

    small = theta < _LOG_SMALL
    near_pi = theta > _LOG_NEAR_PI
    mid = ~(small | near_pi)

    out = np.empty((r.shape[0], 3))
    # generic branch: w has norm 2 sin(theta)
    fac = np.zeros_like(theta)
    fac[mid] = theta[mid] / wn[mid]
    out[mid] = w[mid] * fac[mid, None]
    # tiny angles: w/2 is the rotation vector to third order
    out[small] = 0.5 * w[small] * (1.0 + theta[small, None] ** 2 / 6.0)
    if np.any(near_pi):
        idx = np.nonzero(near_pi)[0]
        # symmetrize before the axis extraction so the sin-term
        # contamination (O(pi - theta)) drops out
        bb = 0.25 * (r[idx] + np.transpose(r[idx], (0, 2, 1))) + 0.5 * np.eye(3)
        diag = np.stack([bb[:, 0, 0], bb[:, 1, 1], bb[:, 2, 2]], axis=1)
        j = np.argmax(diag, axis=1)
        cols = bb[np.arange(len(idx)), :, j]
        cols = cols / np.sqrt(np.maximum(diag[np.arange(len(idx)), j], 1e-300))[:, None]
        cols = cols / np.sqrt(np.sum(cols * cols, axis=1))[:, None]
        dots = np.sum(w[idx] * cols, axis=1)
        sign = np.where(dots < 0.0, -1.0, 1.0)
        out[idx] = cols * (sign * theta[idx])[:, None]
    return out


def angle_to_batch(r, target):
    """Rotation angle between each batch element and a fixed target."""
    c = 0.5 * (np.einsum("nij,ij->n", np.asarray(r, dtype=float),
                         np.asarray(target, dtype=float)) - 1.0)
    return np.arccos(np.clip(c, -1.0, 1.0))
