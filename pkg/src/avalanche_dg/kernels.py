"""Compiled per-cell loops for the time-stepping hot path.

These mirror, operation for operation, the array code in :mod:`dg`,
:mod:`limiter` and :mod:`stopping`, which remain the reference; the test
suite checks the two against each other.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .physics import H_EPS

SQRT_3_5 = math.sqrt(3.0 / 5.0)
_XI = (-SQRT_3_5, 0.0, SQRT_3_5)
_W = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)


@numba.njit(cache=True)
def _flux_speed(h, q, beta):
    if h > H_EPS:
        u = q / h
        qq = q
        hp = h
    else:
        u = 0.0
        qq = 0.0
        hp = 0.0
    f2 = qq * u + 0.5 * beta * hp * hp
    c = math.sqrt(max(beta * max(h, 0.0), 0.0))
    return qq, f2, abs(u) + c


@numba.njit(cache=True)
def _vel(h, q):
    return q / h if h > H_EPS else 0.0


@numba.njit(cache=True)
def _one_sided(a, wet, j, n, dx):
    """Central / one-sided difference of ``a`` towards wet neighbours."""
    jl = j - 1 if j > 0 else 0
    jr = j + 1 if j < n - 1 else n - 1
    if wet[jl] and wet[jr]:
        return (a[jr] - a[jl]) / (2.0 * dx)
    if wet[jr]:
        return (a[jr] - a[j]) / dx
    if wet[jl]:
        return (a[j] - a[jl]) / dx
    return 0.0


@numba.njit(cache=True)
def earth_pressure(field, h_semi, dx, k_act, k_pass, out_k):
    n = field.shape[2]
    ubar = np.empty(n)
    wet = np.empty(n, dtype=np.bool_)
    for j in range(n):
        ubar[j] = _vel(field[0, 0, j], field[1, 0, j])
        wet[j] = field[0, 0, j] >= h_semi
    for j in range(n):
        out_k[j] = k_act if _one_sided(ubar, wet, j, n, dx) >= 0.0 else k_pass


@numba.njit(cache=True)
def rhs(field, m_stop, eps_cos_gauss, sin_gauss, cos_gauss, chi_kappa_gauss,
        eps_cos_face, widths, dx, k_act, k_pass, tan_delta, h_semi, out):
    n = field.shape[2]
    k = np.empty(n)
    earth_pressure(field, h_semi, dx, k_act, k_pass, k)

    fm = np.empty(n + 1)
    fq = np.empty(n + 1)
    for i in range(n + 1):
        jl = i - 1 if i > 0 else 0
        jr = i if i < n else n - 1
        if i == 0:
            hl = field[0, 0, 0] - field[0, 1, 0] + field[0, 2, 0]
            ql = field[1, 0, 0] - field[1, 1, 0] + field[1, 2, 0]
        else:
            hl = field[0, 0, jl] + field[0, 1, jl] + field[0, 2, jl]
            ql = field[1, 0, jl] + field[1, 1, jl] + field[1, 2, jl]
        if i == n:
            hr = field[0, 0, jr] + field[0, 1, jr] + field[0, 2, jr]
            qr = field[1, 0, jr] + field[1, 1, jr] + field[1, 2, jr]
        else:
            hr = field[0, 0, jr] - field[0, 1, jr] + field[0, 2, jr]
            qr = field[1, 0, jr] - field[1, 1, jr] + field[1, 2, jr]
        f1l, f2l, sl = _flux_speed(hl, ql, eps_cos_face[i] * k[jl])
        f1r, f2r, sr = _flux_speed(hr, qr, eps_cos_face[i] * k[jr])
        alpha = max(sl, sr)
        eta = max(m_stop[jl], m_stop[jr])
        fm[i] = 0.5 * (f1l + f1r - eta * alpha * (hr - hl))
        fq[i] = 0.5 * (f2l + f2r - alpha * (qr - ql))

    for j in range(n):
        h1 = 0.0
        h2 = 0.0
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for g in range(3):
            xi = _XI[g]
            p2 = 0.5 * (3.0 * xi * xi - 1.0)
            hg = field[0, 0, j] + field[0, 1, j] * xi + field[0, 2, j] * p2
            qg = field[1, 0, j] + field[1, 1, j] * xi + field[1, 2, j] * p2
            _, f2, _ = _flux_speed(hg, qg, eps_cos_gauss[g, j] * k[j])
            wf2 = _W[g] * f2
            h1 += wf2
            h2 += xi * wf2
            if hg > H_EPS:
                ug = qg / hg
                ceil = tan_delta * max(0.0, cos_gauss[g, j] + chi_kappa_gauss[g, j] * ug * ug)
                sgn = 1.0 if ug > 0.0 else (-1.0 if ug < 0.0 else 0.0)
                src = widths[j] * _W[g] * hg * (sin_gauss[g, j] - sgn * ceil)
            else:
                src = 0.0
            s0 += src
            s1 += src * xi
            s2 += src * p2
        d = widths[j]
        out[0, 0, j] = (0.0 - (fm[j + 1] - fm[j])) / d
        out[0, 1, j] = (2.0 * field[1, 0, j] - (fm[j + 1] + fm[j])) * 3.0 / d
        out[0, 2, j] = (2.0 * field[1, 1, j] - (fm[j + 1] - fm[j])) * 5.0 / d
        out[1, 0, j] = (s0 - (fq[j + 1] - fq[j])) / d
        out[1, 1, j] = (2.0 * h1 + s1 - (fq[j + 1] + fq[j])) * 3.0 / d
        out[1, 2, j] = (6.0 * h2 + s2 - (fq[j + 1] - fq[j])) * 5.0 / d
    return out


@numba.njit(cache=True)
def _minmod(a, b, c):
    if a > 0.0 and b > 0.0 and c > 0.0:
        return min(a, b, c)
    if a < 0.0 and b < 0.0 and c < 0.0:
        return -min(-a, -b, -c)
    if a == 0.0 and b == 0.0 and c == 0.0:
        return 0.0
    return 0.0


@numba.njit(cache=True)
def limit(field, gamma):
    n = field.shape[2]
    avg = field[:, 0, :].copy()
    for v in range(2):
        for j in range(n):
            jl = j - 1 if j > 0 else 0
            jr = j + 1 if j < n - 1 else n - 1
            s = field[v, 1, j]
            new = _minmod(s, gamma * (avg[v, j] - avg[v, jl]), gamma * (avg[v, jr] - avg[v, j]))
            if new != s:
                field[v, 1, j] = new
                field[v, 2, j] = 0.0


@numba.njit(cache=True)
def postprocess(field, widths, dx, sin_c, cos_c, chi_kappa_c, eps_cos_c,
                k_act, k_pass, tan_delta, h_semi, h_eps, u_stop, dt,
                prev_m_stop, wetness, m_stop):
    """Clamp, classify, fix semi-wet cells and run the repose test in place.

    ``prev_m_stop`` holds the previous tags (all ones for none).  Returns the
    mass added by clamping.
    """
    n = field.shape[2]
    added = 0.0
    for j in range(n):
        if field[0, 0, j] < 0.0:
            added -= field[0, 0, j] * widths[j]
            for v in range(2):
                for m in range(3):
                    field[v, m, j] = 0.0

    for j in range(n):
        h = field[0, 0, j]
        if h <= h_eps:
            wetness[j] = 0
            for m in range(3):
                field[1, m, j] = 0.0
        elif h < h_semi:
            wetness[j] = 1
        else:
            wetness[j] = 2

    hbar = field[0, 0, :].copy()
    ubar = np.empty(n)
    for j in range(n):
        ubar[j] = _vel(hbar[j], field[1, 0, j])
    donor = np.zeros(n, dtype=np.int8)
    for j in range(n):
        jl = j - 1 if j > 0 else 0
        jr = j + 1 if j < n - 1 else n - 1
        if hbar[jl] < h_semi and hbar[jr] < h_semi:
            donor[j] = 0
        elif hbar[jl] >= hbar[jr]:
            donor[j] = -1
        else:
            donor[j] = 1
        if wetness[j] == 1:
            u = 0.0 if donor[j] == 0 else (ubar[jl] if donor[j] < 0 else ubar[jr])
            field[1, 0, j] = hbar[j] * u
            field[1, 1, j] = 0.0
            field[1, 2, j] = 0.0

    wet = np.empty(n, dtype=np.bool_)
    for j in range(n):
        ubar[j] = _vel(hbar[j], field[1, 0, j])
        wet[j] = wetness[j] == 2
    for j in range(n):
        if wetness[j] == 0:
            m_stop[j] = 0
            continue
        if wetness[j] == 1:
            continue
        k = k_act if _one_sided(ubar, wet, j, n, dx) >= 0.0 else k_pass
        drive = sin_c[j] - eps_cos_c[j] * k * _one_sided(hbar, wet, j, n, dx)
        u = ubar[j]
        ceil = tan_delta * max(0.0, cos_c[j] + chi_kappa_c[j] * u * u)
        slow = abs(u) <= u_stop or (prev_m_stop[j] == 0 and abs(u) <= dt * ceil)
        m_stop[j] = 0 if (slow and abs(drive) <= ceil) else 1
    for j in range(n):
        if wetness[j] == 1:
            jl = j - 1 if j > 0 else 0
            jr = j + 1 if j < n - 1 else n - 1
            if donor[j] == 0:
                m_stop[j] = 0
            else:
                m_stop[j] = m_stop[jl] if donor[j] < 0 else m_stop[jr]
    for j in range(n):
        if m_stop[j] == 0 and wetness[j] != 0:
            for m in range(3):
                field[1, m, j] = 0.0
    return added
