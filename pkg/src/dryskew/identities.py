"""Pointwise integral identities linking the densities.

Each function integrates one variable out of a higher-dimensional density
numerically and returns ``(integral, closed_form)`` so callers can compare.
"""

from __future__ import annotations

import math

from . import _scalar as _s
from . import analytic
from .params import ModelParams
from .quadrature import QuadratureSpec, endpoint_breaks, integrate_finite, integrate_semi_infinite
from .special import first_passage_density as h

SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=500)


def _spikes(s, *levels):
    # h(r, a) in r peaks at r = a^2/3; break there and geometrically at both ends
    pts = set(endpoint_breaks(0.0, s, 30))
    for a in levels:
        r = a * a / 3.0
        if 0 < r < s:
            pts.add(r)
        if 0 < s - r < s:
            pts.add(s - r)
    return sorted(pts)


def hitting_convolution(s: float, a: float, b: float, spec: QuadratureSpec = SPEC):
    """(int_0^s h(r, a) h(s - r, b) dr, h(s, a + b))."""
    f = lambda r: math.exp(_s.logh(r, a) + _s.logh(s - r, b)) if 0 < r < s else 0.0
    val, _ = integrate_finite(f, 0.0, s, spec, points=_spikes(s, a, b))
    return val, float(h(s, a + b))


def first_identity(t, l, p, spec=SPEC):
    """int_0^t h(v, lp) h(t - v, lq) dv = h(t, l)."""
    return hitting_convolution(t, l * p, l * (1.0 - p), spec)


def second_identity(T, l, x, spec=SPEC):
    """int_0^T h(t, l) h(T - t, x) dt = h(T, l + |x|)."""
    return hitting_convolution(T, l, abs(x), spec)


# -- marginalization steps ------------------------------------------------------


def v_step(t, x, l, params: ModelParams, spec=SPEC):
    """int_0^t joint_tau_v_x_l dv against joint_tau_x_l."""
    p, q, m, T = params.p, params.q, params.m, params.T
    f = lambda v: _s.joint_tau_v_x_l(t, v, x, l, p, -m, m, T)
    val, _ = integrate_finite(f, 0.0, t, spec, points=_spikes(t, l * p, l * q))
    return val, float(analytic.joint_tau_x_l(t, x, l, params))


def t_step(x, l, params: ModelParams, spec=SPEC):
    """int_0^T joint_tau_x_l dt against joint_x_l."""
    p, m, T = params.p, params.m, params.T
    f = lambda t: _s.joint_tau_x_l(t, x, l, p, m, T)
    val, _ = integrate_finite(f, 0.0, T, spec, points=_spikes(T, l, abs(x)))
    return val, float(analytic.joint_x_l(x, l, params))


def _both_sides(f, scale, spec):
    a, _ = integrate_semi_infinite(lambda x: f(x), 0.0, spec, scale=scale)
    b, _ = integrate_semi_infinite(lambda x: f(-x), 0.0, spec, scale=scale)
    return a + b


def x_step(l, params: ModelParams, spec=SPEC):
    """int joint_x_l dx against local_time_density."""
    p, m, T = params.p, params.m, params.T
    val = _both_sides(lambda x: _s.joint_x_l(x, l, p, m, T), math.sqrt(T), spec)
    return val, float(analytic.local_time_density(l, params))


def l_step(x, params: ModelParams, spec=SPEC):
    """int joint_x_l dl against marginal_density."""
    p, m, T = params.p, params.m, params.T
    val, _ = integrate_semi_infinite(lambda l: _s.joint_x_l(x, l, p, m, T), 0.0, spec,
                                     scale=math.sqrt(T))
    return val, float(analytic.marginal_density(x, params))


def occupation_t_step(u, x, l, params: ModelParams, spec=SPEC):
    """int joint_tau_u_x_l dt over the branch t-range against joint_u_x_l."""
    p, q, m, T = params.p, params.q, params.m, params.T
    f = lambda t: _s.joint_tau_u_x_l(t, u, x, l, p, m, T)
    if x >= 0:
        lo, hi, levels = T - u, T, (l * p, abs(x))
    else:
        lo, hi, levels = u, T, (l * q, abs(x))
    pts = [lo + r for r in _spikes(hi - lo, *levels)]
    val, _ = integrate_finite(f, lo, hi, spec, points=pts)
    return val, float(analytic.joint_u_x_l(u, x, l, params))


def occupation_x_step(u, l, params: ModelParams, spec=SPEC):
    """int joint_u_x_l dx against the corrected joint_u_l."""
    p, m, T = params.p, params.m, params.T
    val = _both_sides(lambda x: _s.joint_u_x_l(u, x, l, p, m, T), math.sqrt(min(u, T - u)), spec)
    return val, float(analytic.joint_u_l(u, l, params))


def occupation_l_step(u, params: ModelParams, spec=SPEC):
    """int joint_u_l dl against the tabulation-independent occupation_density."""
    p, m, T = params.p, params.m, params.T
    w = 1.0 / math.sqrt(p * p / u + params.q ** 2 / (T - u))
    val, _ = integrate_semi_infinite(lambda l: _s.joint_u_l(u, l, p, m, T), 0.0,
                                     QuadratureSpec(1e-12, 1e-10, tail_strategy="exp"), scale=w)
    return val, float(analytic.occupation_density(u, params))


def occupation_xl_step(u, params: ModelParams, spec=SPEC):
    """int int joint_u_x_l dx dl against occupation_density."""
    p, q, m, T = params.p, params.q, params.m, params.T
    inner = QuadratureSpec(1e-12, 1e-10, tail_strategy="exp")
    outer = inner.inflated(10.0)
    xs = math.sqrt(min(u, T - u))

    def over_x(l):
        a, _ = integrate_semi_infinite(lambda x: _s.joint_u_x_l(u, x, l, p, m, T), 0.0, inner, xs)
        b, _ = integrate_semi_infinite(lambda x: _s.joint_u_x_l(u, -x, l, p, m, T), 0.0, inner, xs)
        return a + b

    w = 1.0 / math.sqrt(p * p / u + q * q / (T - u))
    val, _ = integrate_semi_infinite(over_x, 0.0, outer, scale=w)
    return val, float(analytic.occupation_density(u, params))


def u_step(l, params: ModelParams, spec=SPEC):
    """int_0^T joint_u_l du against local_time_density (cross-marginal agreement)."""
    p, m, T = params.p, params.m, params.T
    val, _ = integrate_finite(lambda u: _s.joint_u_l(u, l, p, m, T), 0.0, T,
                              QuadratureSpec(1e-13, 1e-11, 500, endpoint_strategy="sqrt"),
                              points=endpoint_breaks(0.0, T, 30))
    return val, float(analytic.local_time_density(l, params))
