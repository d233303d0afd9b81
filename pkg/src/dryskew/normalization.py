"""Total-mass integrals of every density, by nested adaptive quadrature.

Each routine integrates the published density numerically and returns
``(mass, error_estimate)``; nothing here uses a closed-form antiderivative.
Time variables are placed outermost with the sine endpoint map, space and
local-time variables innermost on [0, inf) with the exponential map, which
keeps every inner integrand smooth and bounded (the h kernels peak sharply
in time but are Gaussian-like in space).
"""

from __future__ import annotations

import math
from dataclasses import replace

from . import _scalar as _s
from . import analytic
from .errors import ConfigurationError
from .params import ModelParams
from .quadrature import (
    Dim, QuadratureSpec, integrate_finite, integrate_nested, integrate_semi_infinite,
)

#: innermost tolerance for the 2-D passes; outer passes loosen it tenfold
SPEC_2D = QuadratureSpec(abs_tol=1e-11, rel_tol=1e-10, tail_strategy="exp")
SPEC_3D = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-8, tail_strategy="exp")
SPEC_4D = QuadratureSpec(abs_tol=1e-6, rel_tol=1e-6, tail_strategy="exp")


def _tiny(v):
    return max(v, 1e-300)


def _l_width(a, b, p, q):
    # width in l of h(a, lp) h(b, lq): Gaussian factor exp(-l^2 (p^2/a + q^2/b) / 2)
    return 1.0 / math.sqrt(p * p / _tiny(a) + q * q / _tiny(b))


def _x_scale(params):
    return math.sqrt(params.T)


def _sum_sides(one_side):
    v1, e1 = one_side(+1.0)
    v2, e2 = one_side(-1.0)
    return v1 + v2, e1 + e2


def marginal_mass(params: ModelParams, spec: QuadratureSpec = SPEC_2D):
    p, m, T = params.p, params.m, params.T
    f = lambda x: _s.marginal_density(x, p, m, T)
    return _sum_sides(
        lambda s: integrate_semi_infinite(lambda x: f(s * x), 0.0, spec, scale=_x_scale(params))
    )


def local_time_mass(params: ModelParams, spec: QuadratureSpec = SPEC_2D):
    m, T = params.m, params.T
    return integrate_semi_infinite(
        lambda l: _s.local_time_density(l, m, T), 0.0, spec, scale=math.sqrt(T)
    )


def joint_x_l_mass(params: ModelParams, spec: QuadratureSpec = SPEC_2D):
    p, m, T = params.p, params.m, params.T
    sc = _x_scale(params)

    def side(s):
        dims = [Dim(0.0, math.inf, scale=sc), Dim(0.0, math.inf, scale=sc)]
        return integrate_nested(lambda x, l: _s.joint_x_l(s * x, l, p, m, T), dims, spec)

    return _sum_sides(side)


def joint_u_l_mass(params: ModelParams, form: str = "corrected",
                   spec: QuadratureSpec = SPEC_2D):
    """Mass of the (occupation, local time) joint over (0, T) x [0, inf)."""
    params.require_dry_friction()
    if form not in analytic.PDF2_FORMS:
        raise ConfigurationError(f"form must be one of {analytic.PDF2_FORMS}")
    p, q, m, T = params.p, params.q, params.m, params.T
    corrected = form == "corrected"
    if corrected:
        width = lambda u: _l_width(u, T - u, p, q)
    else:
        # without the h factors each term decays on its own, wider, scale
        width = lambda u: max(math.sqrt(u) / p, math.sqrt(T - u) / q)
    dims = [Dim(0.0, T, endpoint="sqrt"), Dim(0.0, math.inf, scale=width)]
    return integrate_nested(lambda u, l: _s.joint_u_l(u, l, p, m, T, corrected), dims, spec)


def occupation_mass(params: ModelParams, form: str = "corrected"):
    """Mass of the occupation density via the tabulated law (sine-mapped Gauss-Legendre)."""
    law = analytic.OccupationLaw(params, form)
    # panel error: compare with half the panels
    coarse = analytic.OccupationLaw(params, form, panels=32)
    return law.total_mass, abs(law.total_mass - coarse.total_mass)


def occupation_density_mass(params: ModelParams, form: str = "corrected",
                            spec: QuadratureSpec = SPEC_2D):
    """Mass of :func:`analytic.occupation_density` by 1-D quadrature of the 1-D density."""
    T = params.T
    inner = spec.inflated(1.0)
    outer = replace(spec.inflated(10.0), endpoint_strategy="sqrt")
    f = lambda u: analytic.occupation_density(u, params, form, inner) if 0 < u < T else 0.0
    return integrate_finite(f, 0.0, T, outer)


def joint_u_x_l_mass(params: ModelParams, spec: QuadratureSpec = SPEC_3D):
    p, q, m, T = params.p, params.q, params.m, params.T

    def side(s):
        lw = lambda u, x: _l_width(u, T - u, p, q)
        dims = [
            Dim(0.0, T, endpoint="sqrt"),
            Dim(0.0, math.inf, scale=lambda u: math.sqrt(u if s > 0 else T - u)),
            Dim(0.0, math.inf, scale=lw),
        ]
        return integrate_nested(lambda u, x, l: _s.joint_u_x_l(u, s * x, l, p, m, T), dims, spec)

    return _sum_sides(side)


def joint_tau_v_x_l_mass(params: ModelParams, weight: str = "printed",
                         spec: QuadratureSpec = SPEC_4D):
    """Mass over 0 <= v <= t <= T, x real, l >= 0. Works for any (m1, m2)."""
    p, q, m1, m2, T = params.p, params.q, params.m1, params.m2, params.T
    occ = weight == "occupation"
    analytic._check_weight(weight)

    def side(s):
        dims = [
            Dim(0.0, T, endpoint="sqrt"),
            Dim(0.0, lambda t: t, endpoint="sqrt"),
            Dim(0.0, math.inf, scale=lambda t, v: math.sqrt(_tiny(T - t))),
            Dim(0.0, math.inf, scale=lambda t, v, x: _l_width(v, t - v, p, q)),
        ]
        g = lambda t, v, x, l: _s.joint_tau_v_x_l(t, v, s * x, l, p, m1, m2, T, occ)
        return integrate_nested(g, dims, spec)

    return _sum_sides(side)


def joint_tau_u_x_l_mass(params: ModelParams, spec: QuadratureSpec = SPEC_4D):
    """Mass over the two support branches (x >= 0: T - t <= u <= T; x < 0: u <= t)."""
    p, q, m, T = params.p, params.q, params.m, params.T

    def side(s):
        if s > 0:
            u_lo, u_hi = (lambda t: T - t), (lambda t: T)
            lw = lambda t, u, x: _l_width(u + t - T, T - u, p, q)
        else:
            u_lo, u_hi = (lambda t: 0.0), (lambda t: t)
            lw = lambda t, u, x: _l_width(u, t - u, p, q)
        dims = [
            Dim(0.0, T, endpoint="sqrt"),
            Dim(u_lo, u_hi, endpoint="sqrt"),
            Dim(0.0, math.inf, scale=lambda t, u: math.sqrt(_tiny(T - t))),
            Dim(0.0, math.inf, scale=lw),
        ]
        g = lambda t, u, x, l: _s.joint_tau_u_x_l(t, u, s * x, l, p, m, T)
        return integrate_nested(g, dims, spec)

    return _sum_sides(side)
