"""Compiled kernels for the direct optimal-control solver.

The control is piecewise constant on n uniform intervals of [0, T]; each
interval is integrated with m fixed RK4 substeps on the augmented state
(s, i, J), J being the running cost. The gradient kernel runs the exact
reverse-mode sweep of that discretization, so it matches finite differences
of the forward cost to roundoff.
"""

import numpy as np
from numba import njit

# Substeps per interval are chosen so the RK4 step never exceeds this, days.
OC_MAX_SUBSTEP = 0.5


def substeps_per_interval(T: float, n_intervals: int) -> int:
    return max(1, int(np.ceil((T / n_intervals) / OC_MAX_SUBSTEP)))


@njit(cache=True, inline="always")
def _f(s, i, u, beta, gamma, theta, kg0, kg1):
    w = 1.0 - theta * u
    trans = beta * w * w * s * i
    return -trans, trans - gamma * i, u + kg0 * i + kg1 * i * i


@njit(cache=True)
def oc_cost(u, s0, i0, beta, gamma, theta, kg0, kg1, T):
    """Discretized total cost of a control grid u (n intervals on [0, T])."""
    n = u.shape[0]
    m = max(1, int(np.ceil((T / n) / OC_MAX_SUBSTEP)))
    h = T / (n * m)
    s, i, J = s0, i0, 0.0
    for k in range(n):
        uk = u[k]
        for _ in range(m):
            k1s, k1i, k1j = _f(s, i, uk, beta, gamma, theta, kg0, kg1)
            k2s, k2i, k2j = _f(s + 0.5 * h * k1s, i + 0.5 * h * k1i, uk, beta, gamma, theta, kg0, kg1)
            k3s, k3i, k3j = _f(s + 0.5 * h * k2s, i + 0.5 * h * k2i, uk, beta, gamma, theta, kg0, kg1)
            k4s, k4i, k4j = _f(s + h * k3s, i + h * k3i, uk, beta, gamma, theta, kg0, kg1)
            s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
            i += h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            J += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
    return J


@njit(cache=True)
def oc_gradient(u, s0, i0, beta, gamma, theta, kg0, kg1, T):
    """Exact gradient of oc_cost w.r.t. each interval's control level.

    Forward sweep stores the substep states; the backward sweep re-evaluates
    the four stage points of each substep and back-propagates through them.
    Returns (grad, cost).
    """
    n = u.shape[0]
    m = max(1, int(np.ceil((T / n) / OC_MAX_SUBSTEP)))
    h = T / (n * m)

    ys = np.empty((n * m + 1, 2))
    s, i, J = s0, i0, 0.0
    ys[0, 0] = s
    ys[0, 1] = i
    idx = 0
    for k in range(n):
        uk = u[k]
        for _ in range(m):
            k1s, k1i, k1j = _f(s, i, uk, beta, gamma, theta, kg0, kg1)
            k2s, k2i, k2j = _f(s + 0.5 * h * k1s, i + 0.5 * h * k1i, uk, beta, gamma, theta, kg0, kg1)
            k3s, k3i, k3j = _f(s + 0.5 * h * k2s, i + 0.5 * h * k2i, uk, beta, gamma, theta, kg0, kg1)
            k4s, k4i, k4j = _f(s + h * k3s, i + h * k3i, uk, beta, gamma, theta, kg0, kg1)
            s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
            i += h / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
            J += h / 6.0 * (k1j + 2.0 * k2j + 2.0 * k3j + k4j)
            idx += 1
            ys[idx, 0] = s
            ys[idx, 1] = i

    grad = np.zeros(n)
    # Adjoint of (s, i, J); the objective is J(T), so the seed is (0, 0, 1),
    # and the J component stays 1 because nothing feeds back from J.
    as_, ai = 0.0, 0.0
    for k in range(n - 1, -1, -1):
        uk = u[k]
        w = 1.0 - theta * uk
        w2 = w * w
        du = 0.0
        for j in range(m - 1, -1, -1):
            idx = k * m + j
            s, i = ys[idx, 0], ys[idx, 1]

            # recompute the stage points of this substep
            k1s, k1i, _ = _f(s, i, uk, beta, gamma, theta, kg0, kg1)
            x2s, x2i = s + 0.5 * h * k1s, i + 0.5 * h * k1i
            k2s, k2i, _ = _f(x2s, x2i, uk, beta, gamma, theta, kg0, kg1)
            x3s, x3i = s + 0.5 * h * k2s, i + 0.5 * h * k2i
            k3s, k3i, _ = _f(x3s, x3i, uk, beta, gamma, theta, kg0, kg1)
            x4s, x4i = s + h * k3s, i + h * k3i

            # stage weights on (adjoint of y_next, J-adjoint 1)
            c16, c13 = h / 6.0, h / 3.0

            # stage 4
            kb_s, kb_i, kb_j = c16 * as_, c16 * ai, c16
            xs, xi = x4s, x4i
            du += 2.0 * beta * theta * w * xs * xi * (kb_s - kb_i) + kb_j
            t_s = -beta * w2 * xi * kb_s + beta * w2 * xi * kb_i
            t_i = -beta * w2 * xs * kb_s + (beta * w2 * xs - gamma) * kb_i + (kg0 + 2.0 * kg1 * xi) * kb_j
            x4bs, x4bi = t_s, t_i

            # stage 3 (the J-adjoint picks up nothing through x4: J never enters f)
            kb_s, kb_i, kb_j = c13 * as_ + h * x4bs, c13 * ai + h * x4bi, c13
            xs, xi = x3s, x3i
            du += 2.0 * beta * theta * w * xs * xi * (kb_s - kb_i) + kb_j
            t_s = -beta * w2 * xi * kb_s + beta * w2 * xi * kb_i
            t_i = -beta * w2 * xs * kb_s + (beta * w2 * xs - gamma) * kb_i + (kg0 + 2.0 * kg1 * xi) * kb_j
            x3bs, x3bi = t_s, t_i

            # stage 2
            kb_s, kb_i, kb_j = c13 * as_ + 0.5 * h * x3bs, c13 * ai + 0.5 * h * x3bi, c13
            xs, xi = x2s, x2i
            du += 2.0 * beta * theta * w * xs * xi * (kb_s - kb_i) + kb_j
            t_s = -beta * w2 * xi * kb_s + beta * w2 * xi * kb_i
            t_i = -beta * w2 * xs * kb_s + (beta * w2 * xs - gamma) * kb_i + (kg0 + 2.0 * kg1 * xi) * kb_j
            x2bs, x2bi = t_s, t_i

            # stage 1
            kb_s, kb_i, kb_j = c16 * as_ + 0.5 * h * x2bs, c16 * ai + 0.5 * h * x2bi, c16
            xs, xi = s, i
            du += 2.0 * beta * theta * w * xs * xi * (kb_s - kb_i) + kb_j
            t_s = -beta * w2 * xi * kb_s + beta * w2 * xi * kb_i
            t_i = -beta * w2 * xs * kb_s + (beta * w2 * xs - gamma) * kb_i + (kg0 + 2.0 * kg1 * xi) * kb_j
            x1bs, x1bi = t_s, t_i

            as_ = as_ + x1bs + x2bs + x3bs + x4bs
            ai = ai + x1bi + x2bi + x3bi + x4bi
        grad[k] = du

    cost = J
    return grad, cost
