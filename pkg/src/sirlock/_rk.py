"""Adaptive Dormand-Prince 5(4) stepper for the 2-state (s, i) system.

The recovered fraction is reconstructed as r = 1 - s - i, which enforces the
simplex constraint exactly, so the integrator advances only (s, i). The hot
path is compiled with numba; a pure-Python twin with identical logic backs
arbitrary user-supplied control callables.

Control laws the kernel understands (kind codes):
    0  constant level (c0)
    1  reproduction-number targeting: L solves beta*(1-theta*L)^2*s = gamma*c0
    2  prevalence hold: L solves beta*(1-theta*L)^2*s = gamma
    3  force-of-infection cap: L solves beta*(1-theta*L)^2*s*i = c0
All laws clamp to [0, l_max].

Events are thresholds on s or i; crossings are located by bisection on the
cubic Hermite interpolant of the accepted step to 1e-10 days.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# b - b_hat (embedded 4th-order error coefficients)
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0

EVENT_TIME_TOL = 1e-10  # bisection resolution for threshold crossings, days

STATUS_DONE = 0
STATUS_EVENT = 1
STATUS_UNDERFLOW = 2

KIND_CONSTANT = 0
KIND_REPRO_TARGET = 1
KIND_HOLD_PREVALENCE = 2
KIND_FOI_CAP = 3


@njit(cache=True, inline="always")
def _control_level(kind, c0, beta, gamma, theta, lmax, s, i):
    if kind == KIND_CONSTANT:
        L = c0
    elif kind == KIND_REPRO_TARGET:
        # beta*(1-theta*L)^2*s = gamma*rho, rho = c0
        if beta * s <= gamma * c0:
            L = 0.0
        else:
            L = (1.0 - math.sqrt(gamma * c0 / (beta * s))) / theta
    elif kind == KIND_HOLD_PREVALENCE:
        if beta * s <= gamma:
            L = 0.0
        else:
            L = (1.0 - math.sqrt(gamma / (beta * s))) / theta
    else:
        # force-of-infection cap at c0
        f = beta * s * i
        if f <= c0:
            L = 0.0
        else:
            L = (1.0 - math.sqrt(c0 / f)) / theta
    if L < 0.0:
        L = 0.0
    elif L > lmax:
        L = lmax
    return L


@njit(cache=True, inline="always")
def _rhs(kind, c0, beta, gamma, theta, lmax, s, i):
    L = _control_level(kind, c0, beta, gamma, theta, lmax, s, i)
    u = 1.0 - theta * L
    trans = beta * u * u * s * i
    return -trans, trans - gamma * i


@njit(cache=True, inline="always")
def _hermite(y0, y1, f0, f1, h, x):
    x2 = x * x
    x3 = x2 * x
    return (
        (2.0 * x3 - 3.0 * x2 + 1.0) * y0
        + (x3 - 2.0 * x2 + x) * h * f0
        + (-2.0 * x3 + 3.0 * x2) * y1
        + (x3 - x2) * h * f1
    )


@njit(cache=True)
def dp45_segment(
    kind,
    c0,
    beta,
    gamma,
    theta,
    lmax,
    t0,
    s0,
    i0,
    t_end,
    rtol,
    atol,
    max_step,
    ev_var,
    ev_val,
    ev_dir,
):
    """Integrate (s, i) from t0 to t_end under one control law.

    ev_var: -1 no event, 0 threshold on s, 1 threshold on i.
    ev_dir: -1 downward crossing, +1 upward, 0 either.
    Returns (ts, ss, ii, LL, status) with one row per accepted step
    (the initial point included; the last row is the event location when
    status == STATUS_EVENT).
    """
    cap = 256
    ts = np.empty(cap)
    ss = np.empty(cap)
    ii = np.empty(cap)
    LL = np.empty(cap)

    t = t0
    s = s0
    i = i0
    n = 0
    ts[n] = t
    ss[n] = s
    ii[n] = i
    LL[n] = _control_level(kind, c0, beta, gamma, theta, lmax, s, i)
    n += 1

    status = STATUS_DONE
    if t_end - t0 <= 0.0:
        return ts[:n], ss[:n], ii[:n], LL[:n], status

    fs, fi = _rhs(kind, c0, beta, gamma, theta, lmax, s, i)
    h = min(max_step, t_end - t0)

    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        if h > t_end - t:
            h = t_end - t
        hmin = 1e-12 * max(1.0, abs(t))
        if h < hmin:
            status = STATUS_UNDERFLOW
            break

        # stages (k1 = fs, fi by FSAL)
        k1s, k1i = fs, fi
        ys = s + h * _A21 * k1s
        yi = i + h * _A21 * k1i
        k2s, k2i = _rhs(kind, c0, beta, gamma, theta, lmax, ys, yi)
        ys = s + h * (_A31 * k1s + _A32 * k2s)
        yi = i + h * (_A31 * k1i + _A32 * k2i)
        k3s, k3i = _rhs(kind, c0, beta, gamma, theta, lmax, ys, yi)
        ys = s + h * (_A41 * k1s + _A42 * k2s + _A43 * k3s)
        yi = i + h * (_A41 * k1i + _A42 * k2i + _A43 * k3i)
        k4s, k4i = _rhs(kind, c0, beta, gamma, theta, lmax, ys, yi)
        ys = s + h * (_A51 * k1s + _A52 * k2s + _A53 * k3s + _A54 * k4s)
        yi = i + h * (_A51 * k1i + _A52 * k2i + _A53 * k3i + _A54 * k4i)
        k5s, k5i = _rhs(kind, c0, beta, gamma, theta, lmax, ys, yi)
        ys = s + h * (_A61 * k1s + _A62 * k2s + _A63 * k3s + _A64 * k4s + _A65 * k5s)
        yi = i + h * (_A61 * k1i + _A62 * k2i + _A63 * k3i + _A64 * k4i + _A65 * k5i)
        k6s, k6i = _rhs(kind, c0, beta, gamma, theta, lmax, ys, yi)
        s_new = s + h * (_B1 * k1s + _B3 * k3s + _B4 * k4s + _B5 * k5s + _B6 * k6s)
        i_new = i + h * (_B1 * k1i + _B3 * k3i + _B4 * k4i + _B5 * k5i + _B6 * k6i)
        t_new = t + h
        k7s, k7i = _rhs(kind, c0, beta, gamma, theta, lmax, s_new, i_new)

        err_s = h * (_E1 * k1s + _E3 * k3s + _E4 * k4s + _E5 * k5s + _E6 * k6s + _E7 * k7s)
        err_i = h * (_E1 * k1i + _E3 * k3i + _E4 * k4i + _E5 * k5i + _E6 * k6i + _E7 * k7i)
        sc_s = atol + rtol * max(abs(s), abs(s_new))
        sc_i = atol + rtol * max(abs(i), abs(i_new))
        err = math.sqrt(0.5 * ((err_s / sc_s) ** 2 + (err_i / sc_i) ** 2))

        if err != err:  # NaN: treat as hard rejection
            h *= 0.2
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err**-0.2)
            continue

        # accepted; check for a threshold crossing inside the step
        hit = False
        th = 1.0
        if ev_var >= 0:
            g_old = (s if ev_var == 0 else i) - ev_val
            g_new = (s_new if ev_var == 0 else i_new) - ev_val
            if ev_dir <= 0 and g_old > 0.0 and g_new <= 0.0:
                hit = True
            elif ev_dir >= 0 and g_old < 0.0 and g_new >= 0.0:
                hit = True
            if hit:
                lo = 0.0
                hi = 1.0
                sgn_old = 1.0 if g_old > 0.0 else -1.0
                while (hi - lo) * h > EVENT_TIME_TOL:
                    mid = 0.5 * (lo + hi)
                    if ev_var == 0:
                        gv = _hermite(s, s_new, k1s, k7s, h, mid) - ev_val
                    else:
                        gv = _hermite(i, i_new, k1i, k7i, h, mid) - ev_val
                    if gv * sgn_old > 0.0:
                        lo = mid
                    else:
                        hi = mid
                th = 0.5 * (lo + hi)
                t_new = t + th * h
                s_new = _hermite(s, s_new, k1s, k7s, h, th)
                i_new = _hermite(i, i_new, k1i, k7i, h, th)

        if s_new < 0.0:
            s_new = 0.0
        if i_new < 0.0:
            i_new = 0.0

        if n == cap:
            cap *= 2
            ts2 = np.empty(cap)
            ss2 = np.empty(cap)
            ii2 = np.empty(cap)
            LL2 = np.empty(cap)
            ts2[:n] = ts[:n]
            ss2[:n] = ss[:n]
            ii2[:n] = ii[:n]
            LL2[:n] = LL[:n]
            ts, ss, ii, LL = ts2, ss2, ii2, LL2
        ts[n] = t_new
        ss[n] = s_new
        ii[n] = i_new
        LL[n] = _control_level(kind, c0, beta, gamma, theta, lmax, s_new, i_new)
        n += 1

        if hit:
            status = STATUS_EVENT
            break

        t, s, i = t_new, s_new, i_new
        fs, fi = _rhs(kind, c0, beta, gamma, theta, lmax, s, i)
        fac = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err**-0.2))
        h = min(max_step, h * fac)

    return ts[:n].copy(), ss[:n].copy(), ii[:n].copy(), LL[:n].copy(), status


def dp45_segment_py(
    control_fn,
    beta,
    gamma,
    theta,
    lmax,
    t0,
    s0,
    i0,
    t_end,
    rtol,
    atol,
    max_step,
    ev_var,
    ev_val,
    ev_dir,
):
    """Pure-Python twin of dp45_segment for arbitrary control callables.

    control_fn(t, s, i) -> L (clamped here). Same stepping, error control and
    event location as the compiled kernel.
    """

    def level(t, s, i):
        L = control_fn(t, s, i)
        return min(max(L, 0.0), lmax)

    def rhs(t, s, i):
        L = level(t, s, i)
        u = 1.0 - theta * L
        trans = beta * u * u * s * i
        return -trans, trans - gamma * i

    ts = [t0]
    ss = [s0]
    ii = [i0]
    LL = [level(t0, s0, i0)]
    t, s, i = t0, s0, i0
    status = STATUS_DONE
    if t_end - t0 <= 0.0:
        return (np.array(ts), np.array(ss), np.array(ii), np.array(LL), status)

    fs, fi = rhs(t, s, i)
    h = min(max_step, t_end - t0)

    while t < t_end - 1e-12 * max(1.0, abs(t_end)):
        if h > t_end - t:
            h = t_end - t
        hmin = 1e-12 * max(1.0, abs(t))
        if h < hmin:
            status = STATUS_UNDERFLOW
            break

        k1s, k1i = fs, fi
        k2s, k2i = rhs(t + _C2 * h, s + h * _A21 * k1s, i + h * _A21 * k1i)
        k3s, k3i = rhs(
            t + _C3 * h, s + h * (_A31 * k1s + _A32 * k2s), i + h * (_A31 * k1i + _A32 * k2i)
        )
        k4s, k4i = rhs(
            t + _C4 * h,
            s + h * (_A41 * k1s + _A42 * k2s + _A43 * k3s),
            i + h * (_A41 * k1i + _A42 * k2i + _A43 * k3i),
        )
        k5s, k5i = rhs(
            t + _C5 * h,
            s + h * (_A51 * k1s + _A52 * k2s + _A53 * k3s + _A54 * k4s),
            i + h * (_A51 * k1i + _A52 * k2i + _A53 * k3i + _A54 * k4i),
        )
        k6s, k6i = rhs(
            t + h,
            s + h * (_A61 * k1s + _A62 * k2s + _A63 * k3s + _A64 * k4s + _A65 * k5s),
            i + h * (_A61 * k1i + _A62 * k2i + _A63 * k3i + _A64 * k4i + _A65 * k5i),
        )
        s_new = s + h * (_B1 * k1s + _B3 * k3s + _B4 * k4s + _B5 * k5s + _B6 * k6s)
        i_new = i + h * (_B1 * k1i + _B3 * k3i + _B4 * k4i + _B5 * k5i + _B6 * k6i)
        t_new = t + h
        k7s, k7i = rhs(t_new, s_new, i_new)

        err_s = h * (_E1 * k1s + _E3 * k3s + _E4 * k4s + _E5 * k5s + _E6 * k6s + _E7 * k7s)
        err_i = h * (_E1 * k1i + _E3 * k3i + _E4 * k4i + _E5 * k5i + _E6 * k6i + _E7 * k7i)
        sc_s = atol + rtol * max(abs(s), abs(s_new))
        sc_i = atol + rtol * max(abs(i), abs(i_new))
        err = math.sqrt(0.5 * ((err_s / sc_s) ** 2 + (err_i / sc_i) ** 2))

        if math.isnan(err):
            h *= 0.2
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err**-0.2)
            continue

        hit = False
        if ev_var >= 0:
            g_old = (s if ev_var == 0 else i) - ev_val
            g_new = (s_new if ev_var == 0 else i_new) - ev_val
            if ev_dir <= 0 and g_old > 0.0 and g_new <= 0.0:
                hit = True
            elif ev_dir >= 0 and g_old < 0.0 and g_new >= 0.0:
                hit = True
            if hit:
                y0, y1, f0, f1 = (s, s_new, k1s, k7s) if ev_var == 0 else (i, i_new, k1i, k7i)
                lo, hi = 0.0, 1.0
                sgn_old = 1.0 if g_old > 0.0 else -1.0
                while (hi - lo) * h > EVENT_TIME_TOL:
                    mid = 0.5 * (lo + hi)
                    gv = _hermite_py(y0, y1, f0, f1, h, mid) - ev_val
                    if gv * sgn_old > 0.0:
                        lo = mid
                    else:
                        hi = mid
                th = 0.5 * (lo + hi)
                t_new = t + th * h
                s_new = _hermite_py(s, s_new, k1s, k7s, h, th)
                i_new = _hermite_py(i, i_new, k1i, k7i, h, th)

        s_new = max(s_new, 0.0)
        i_new = max(i_new, 0.0)
        ts.append(t_new)
        ss.append(s_new)
        ii.append(i_new)
        LL.append(level(t_new, s_new, i_new))

        if hit:
            status = STATUS_EVENT
            break

        t, s, i = t_new, s_new, i_new
        fs, fi = rhs(t, s, i)
        fac = 10.0 if err == 0.0 else min(10.0, max(0.2, 0.9 * err**-0.2))
        h = min(max_step, h * fac)

    return np.array(ts), np.array(ss), np.array(ii), np.array(LL), status


def _hermite_py(y0, y1, f0, f1, h, x):
    x2 = x * x
    x3 = x2 * x
    return (
        (2.0 * x3 - 3.0 * x2 + 1.0) * y0
        + (x3 - 2.0 * x2 + x) * h * f0
        + (-2.0 * x3 + 3.0 * x2) * y1
        + (x3 - x2) * h * f1
    )
