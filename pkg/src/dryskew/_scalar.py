"""Float-only twins of the array formulas in :mod:`dryskew.analytic`.

Nested quadrature evaluates the densities one point at a time, where numpy
dispatch costs ~20x the arithmetic. Domain checks live in the public
wrappers; these assume valid input. Kept in lock-step with the array code
by ``tests/test_scalar_paths.py``.
"""

import math

from scipy.special import erfc as _erfc_u, erfcx as _erfcx_u

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
NEG_INF = -math.inf


def exp(x):
    if x < -745.0:
        return 0.0
    if x > 709.0:
        return math.inf
    return math.exp(x)


def logh(s, y):
    y = abs(y)
    if s <= 0.0 or y == 0.0:
        return NEG_INF
    return math.log(y) - 1.5 * math.log(s) - LOG_SQRT_2PI - y * y / (2.0 * s)


def log_branch(x, p):
    return math.log(2.0 * p) if x >= 0 else math.log(2.0 * (1.0 - p))


def exp_erfc(a, z):
    if z >= 0:
        return float(_erfcx_u(z)) * exp(a - z * z)
    return math.erfc(z) * exp(a)


def skeleton(t, v, x, l, p, T):
    return exp(log_branch(x, p) + logh(v, l * p) + logh(t - v, l * (1.0 - p)) + logh(T - t, x))


def joint_tau_v_x_l(t, v, x, l, p, m1, m2, T, occupation=False):
    q = 1.0 - p
    mx = m1 if x >= 0 else m2
    u = v + T - t if (occupation and x >= 0) else v
    w = -(m1 * m1 * u + m2 * m2 * (T - u)) / 2.0 - l * (m1 * p - q * m2) + mx * x
    return exp(log_branch(x, p) + logh(v, l * p) + logh(t - v, l * q) + logh(T - t, x) + w)


def dry_weight(x, l, m, T):
    return -m * m * T / 2.0 - m * abs(x) + l * m


def joint_tau_x_l(t, x, l, p, m, T):
    return exp(log_branch(x, p) + logh(t, l) + logh(T - t, x) + dry_weight(x, l, m, T))


def joint_x_l(x, l, p, m, T):
    return exp(log_branch(x, p) + logh(T, l + abs(x)) + dry_weight(x, l, m, T))


def marginal_density(x, p, m, T):
    ax = abs(x)
    gauss = exp(-(m * T + ax) ** 2 / (2.0 * T) - 0.5 * math.log(T) - LOG_SQRT_2PI)
    tail = 0.5 * m * exp_erfc(-2.0 * m * ax, (ax - m * T) / math.sqrt(2.0 * T))
    return (2.0 * p if x >= 0 else 2.0 * (1.0 - p)) * (gauss + tail)


def joint_tau_u_x_l(t, u, x, l, p, m, T):
    if not (0.0 <= t <= T and l >= 0):
        return 0.0
    q = 1.0 - p
    if x >= 0:
        if not (T - t <= u <= T):
            return 0.0
        lk = logh(u + t - T, l * p) + logh(T - u, l * q)
    else:
        if not (0.0 <= u <= t):
            return 0.0
        lk = logh(u, l * p) + logh(t - u, l * q)
    return exp(log_branch(x, p) + lk + logh(T - t, x) + dry_weight(x, l, m, T))


def joint_u_x_l(u, x, l, p, m, T):
    if not (0.0 < u < T):
        return 0.0
    q = 1.0 - p
    ax = abs(x)
    if x >= 0:
        lk = logh(u, l * p + ax) + logh(T - u, l * q)
    else:
        lk = logh(T - u, l * q + ax) + logh(u, l * p)
    return exp(log_branch(x, p) + lk + dry_weight(x, l, m, T))


def f_aux_scaled(y, l, c, m, log_scale):
    if log_scale == NEG_INF:
        return 0.0
    a = l * c
    g = -a * a / (2.0 * y)
    z = (a + m * y) / math.sqrt(2.0 * y)
    inv = math.exp(-0.5 * math.log(y) - LOG_SQRT_2PI)
    if z >= 0:
        return exp(g + log_scale) * (inv - 0.5 * m * float(_erfcx_u(z)))
    return exp(g + log_scale) * inv - 0.5 * m * float(_erfc_u(z)) * exp(a * m + m * m * y / 2.0 + log_scale)


def joint_u_l(u, l, p, m, T, corrected=True):
    if not (0.0 < u < T):
        return 0.0
    q = 1.0 - p
    base = math.log(2.0) - m * m * T / 2.0 + l * m
    if corrected:
        s1 = base + math.log(p) + logh(T - u, l * q)
        s2 = base + math.log(q) + logh(u, l * p)
    else:
        s1 = base + math.log(p)
        s2 = base + math.log(q)
    return f_aux_scaled(u, l, p, m, s1) + f_aux_scaled(T - u, l, q, m, s2)


def local_time_density(l, m, T):
    return f_aux_scaled(T, l, 1.0, m, math.log(2.0) - m * m * T / 2.0 + l * m)
