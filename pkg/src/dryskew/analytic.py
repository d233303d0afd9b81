"""Closed-form laws of skew Brownian motion with dry friction started at 0.

Notation: ``t`` last visit to 0 before the horizon, ``v`` time spent in
[0, inf) up to ``t``, ``u`` total time in [0, inf), ``x`` terminal value,
``l`` local time at 0 (symmetric window normalisation). ``h`` is the
first-passage kernel from :mod:`dryskew.special`.

All densities are assembled in log space and exponentiated once, so
products of tiny kernels underflow to exact 0 instead of producing NaN.
Two-branch formulas take the ``x >= 0`` branch at ``x = 0``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import interpolate as _interp
from scipy import special as _sp

from . import _scalar as _s
from .errors import ConfigurationError, DomainError
from .params import ModelParams
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_finite_vec, integrate_semi_infinite
from .special import LOG_SQRT_2PI

PDF2_FORMS = ("corrected", "verbatim")


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _arr(v):
    return np.asarray(v, dtype=float)


def _scalars(*args):
    return all(isinstance(a, (float, int)) for a in args)


def _require(cond, msg):
    if not np.all(cond):
        raise DomainError(msg)


def _logh(s, y):
    """log h(s, y), with the s -> 0 and y = 0 limits mapped to -inf."""
    s = _arr(s)
    y = np.abs(_arr(y))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.log(y) - 1.5 * np.log(s) - LOG_SQRT_2PI - y * y / (2.0 * s)
    return np.where((s > 0) & (y > 0), out, -np.inf)


def _log_branch(x, p):
    return np.where(_arr(x) >= 0, math.log(2.0 * p), math.log(2.0 * (1.0 - p)))


def _exp(logv):
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(logv)


def _exp_erfc(a, z):
    """exp(a) * erfc(z) without overflow in exp(a) when erfc(z) is tiny."""
    a, z = np.broadcast_arrays(_arr(a), _arr(z))
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        pos = _sp.erfcx(np.maximum(z, 0.0)) * np.exp(a - z * z)
        neg = _sp.erfc(z) * np.exp(a)
    return np.where(z >= 0, pos, neg)


# -- first-passage skeleton and the general-drift joint --------------------


def skeleton_density(t, v, x, l, p, T):
    """Zero-drift joint density of (last zero, pre-last-zero occupation, X_T, L_T)."""
    if _scalars(t, v, x, l):
        if not (0 <= v <= t <= T and l >= 0):
            raise DomainError("need 0 <= v <= t <= T and l >= 0")
        return _s.skeleton(t, v, x, l, p, T)
    t, v, x, l = np.broadcast_arrays(_arr(t), _arr(v), _arr(x), _arr(l))
    _require((0 <= v) & (v <= t) & (t <= T), "need 0 <= v <= t <= T")
    _require(l >= 0, "local time must be >= 0")
    q = 1.0 - p
    logd = _log_branch(x, p) + _logh(v, l * p) + _logh(t - v, l * q) + _logh(T - t, x)
    return _out(_exp(logd))


WEIGHTS = ("printed", "occupation")


def _check_weight(weight):
    if weight not in WEIGHTS:
        raise ConfigurationError(f"weight must be one of {WEIGHTS}, got {weight!r}")


def drift_log_weight(v, x, l, params: ModelParams, weight: str = "printed", t=None):
    """Exponential change-of-measure factor (in log) for two-valued drift.

    ``weight="printed"`` charges m1^2 over the pre-zero occupation ``v``.
    ``weight="occupation"`` charges it over the full time spent on [0, inf),
    i.e. v + T - t when x >= 0; this needs ``t``. The two agree whenever
    m1^2 = m2^2, in particular under dry friction.
    """
    _check_weight(weight)
    v, x, l = _arr(v), _arr(x), _arr(l)
    p, q, m1, m2, T = params.p, params.q, params.m1, params.m2, params.T
    if weight == "occupation":
        if t is None:
            raise ConfigurationError("the occupation weight needs t")
        v = np.where(x >= 0, v + T - _arr(t), v)
    drift_at_x = np.where(x >= 0, m1, m2)
    return -(m1 * m1 * v + m2 * m2 * (T - v)) / 2.0 - l * (m1 * p - q * m2) + drift_at_x * x


def joint_tau_v_x_l(t, v, x, l, params: ModelParams, weight: str = "printed"):
    """Joint density of (last zero, occupation before it, X_T, L_T); any m1, m2.

    The default weight follows the published formula, which keeps unit mass
    only when m1^2 = m2^2; see :func:`drift_log_weight`.
    """
    _check_weight(weight)
    if _scalars(t, v, x, l):
        if not (0 <= v <= t <= params.T and l >= 0):
            raise DomainError("need 0 <= v <= t <= T and l >= 0")
        return _s.joint_tau_v_x_l(t, v, x, l, params.p, params.m1, params.m2, params.T,
                                  weight == "occupation")
    t, v, x, l = np.broadcast_arrays(_arr(t), _arr(v), _arr(x), _arr(l))
    T = params.T
    _require((0 <= v) & (v <= t) & (t <= T), "need 0 <= v <= t <= T")
    _require(l >= 0, "local time must be >= 0")
    p, q = params.p, params.q
    logd = (
        _log_branch(x, p)
        + _logh(v, l * p) + _logh(t - v, l * q) + _logh(T - t, x)
        + drift_log_weight(v, x, l, params, weight, t)
    )
    return _out(_exp(logd))


# -- dry-friction chain ------------------------------------------------------


def _dry_log_weight(x, l, params):
    m = params.m
    return -m * m * params.T / 2.0 - m * np.abs(_arr(x)) + _arr(l) * m


def joint_tau_x_l(t, x, l, params: ModelParams):
    """Joint density of (last zero, X_T, L_T)."""
    params.require_dry_friction()
    if _scalars(t, x, l):
        if not (0 <= t <= params.T and l >= 0):
            raise DomainError("need 0 <= t <= T and l >= 0")
        return _s.joint_tau_x_l(t, x, l, params.p, params.m, params.T)
    t, x, l = np.broadcast_arrays(_arr(t), _arr(x), _arr(l))
    _require((0 <= t) & (t <= params.T), "need 0 <= t <= T")
    _require(l >= 0, "local time must be >= 0")
    logd = (_log_branch(x, params.p) + _logh(t, l) + _logh(params.T - t, x)
            + _dry_log_weight(x, l, params))
    return _out(_exp(logd))


def joint_x_l(x, l, params: ModelParams):
    """Joint density of (X_T, L_T)."""
    params.require_dry_friction()
    if _scalars(x, l):
        if l < 0:
            raise DomainError("local time must be >= 0")
        return _s.joint_x_l(x, l, params.p, params.m, params.T)
    x, l = np.broadcast_arrays(_arr(x), _arr(l))
    _require(l >= 0, "local time must be >= 0")
    logd = _log_branch(x, params.p) + _logh(params.T, l + np.abs(x)) + _dry_log_weight(x, l, params)
    return _out(_exp(logd))


def marginal_density(x, params: ModelParams):
    """Density of X_T.

    For x >= 0: 2p [phi_T(mT + x) + (m/2) e^{-2mx} (1 + erf((mT - x)/sqrt(2T)))];
    the x < 0 branch swaps p for q and x for -x.
    """
    params.require_dry_friction()
    if _scalars(x):
        return _s.marginal_density(x, params.p, params.m, params.T)
    x = _arr(x)
    m, T, p = params.m, params.T, params.p
    ax = np.abs(x)
    with np.errstate(under="ignore"):
        gauss = np.exp(-(m * T + ax) ** 2 / (2.0 * T) - 0.5 * math.log(T) - LOG_SQRT_2PI)
    # 1 + erf(w) = erfc(-w)
    tail = 0.5 * m * _exp_erfc(-2.0 * m * ax, (ax - m * T) / math.sqrt(2.0 * T))
    weight = np.where(x >= 0, 2.0 * p, 2.0 * (1.0 - p))
    return _out(weight * (gauss + tail))


def marginal_cdf(x, params: ModelParams):
    """P(X_T <= x), from the closed-form antiderivative of :func:`marginal_density`."""
    params.require_dry_friction()
    x = _arr(x)
    m, T, p, q = params.m, params.T, params.p, params.q
    ax = np.abs(x)
    r = math.sqrt(2.0 * T)
    # mass of the half-line beyond |x| on the side of x, per unit branch weight
    beyond = 0.5 * (_sp.erfc((ax + m * T) / r) + _exp_erfc(-2.0 * m * ax, (ax - m * T) / r))
    return _out(np.where(x >= 0, 1.0 - p * beyond, q * beyond))


def joint_tau_u_x_l(t, u, x, l, params: ModelParams):
    """Joint density of (last zero, occupation of [0, inf), X_T, L_T).

    Zero off the support: for x >= 0 it needs T - t <= u <= T, for x < 0
    it needs 0 <= u <= t.
    """
    params.require_dry_friction()
    if _scalars(t, u, x, l):
        return _s.joint_tau_u_x_l(t, u, x, l, params.p, params.m, params.T)
    t, u, x, l = np.broadcast_arrays(_arr(t), _arr(u), _arr(x), _arr(l))
    T, p, q = params.T, params.p, params.q
    pos = x >= 0
    in_t = (0 <= t) & (t <= T) & (l >= 0)
    supp = in_t & np.where(pos, (T - t <= u) & (u <= T), (0 <= u) & (u <= t))
    lk_pos = _logh(u + t - T, l * p) + _logh(T - u, l * q)
    lk_neg = _logh(u, l * p) + _logh(t - u, l * q)
    logd = (_log_branch(x, p) + np.where(pos, lk_pos, lk_neg) + _logh(T - t, x)
            + _dry_log_weight(x, l, params))
    return _out(np.where(supp, _exp(logd), 0.0))


def joint_u_x_l(u, x, l, params: ModelParams):
    """Joint density of (occupation of [0, inf), X_T, L_T); zero for u outside (0, T)."""
    params.require_dry_friction()
    if _scalars(u, x, l):
        if l < 0:
            raise DomainError("local time must be >= 0")
        return _s.joint_u_x_l(u, x, l, params.p, params.m, params.T)
    u, x, l = np.broadcast_arrays(_arr(u), _arr(x), _arr(l))
    T, p, q = params.T, params.p, params.q
    _require(l >= 0, "local time must be >= 0")
    ax = np.abs(x)
    lk = np.where(
        x >= 0,
        _logh(u, l * p + ax) + _logh(T - u, l * q),
        _logh(T - u, l * q + ax) + _logh(u, l * p),
    )
    logd = _log_branch(x, p) + lk + _dry_log_weight(x, l, params)
    inside = (u > 0) & (u < T)
    return _out(np.where(inside, _exp(logd), 0.0))


def _f_aux_scaled(y, l, c, m, log_scale):
    """F(y, l, c) * exp(log_scale), stable for large |m| y and large l."""
    y, l, c, log_scale = np.broadcast_arrays(_arr(y), _arr(l), _arr(c), _arr(log_scale))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        a = l * c
        g = -a * a / (2.0 * y)
        z = (a + m * y) / np.sqrt(2.0 * y)
        inv = np.exp(-0.5 * np.log(y) - LOG_SQRT_2PI)
        # z >= 0: F = e^{g} (1/sqrt(2 pi y) - (m/2) erfcx(z))
        pos = np.exp(g + log_scale) * (inv - 0.5 * m * _sp.erfcx(np.maximum(z, 0.0)))
        neg = (np.exp(g + log_scale) * inv
               - 0.5 * m * _sp.erfc(z) * np.exp(a * m + m * m * y / 2.0 + log_scale))
        out = np.where(z >= 0, pos, neg)
    return np.where(np.isneginf(log_scale), 0.0, out)


def f_aux(y, l, c, m):
    """F(y, l, c) = exp(-l^2 c^2 / 2y)/sqrt(2 pi y) - (m/2) erfc((lc + my)/sqrt(2y)) e^{lmc + m^2 y/2}.

    Equals the integral over x in [0, inf) of h(y, lc + x) e^{-mx}.
    """
    if _scalars(y, l, c):
        if not (y > 0 and l >= 0):
            raise DomainError("need y > 0 and l >= 0")
        return _s.f_aux_scaled(y, l, c, float(m), 0.0)
    y = _arr(y)
    _require(y > 0, "y must be > 0")
    _require(_arr(l) >= 0, "l must be >= 0")
    return _out(_f_aux_scaled(y, l, c, float(m), 0.0))


def joint_u_l(u, l, params: ModelParams, form: str = "corrected"):
    """Joint density of (occupation of [0, inf), L_T); zero for u outside (0, T).

    ``form="corrected"`` is the x-integral of :func:`joint_u_x_l`:
    2 e^{-m^2 T/2 + lm} [p F(u,l,p) h(T-u,lq) + q F(T-u,l,q) h(u,lp)].
    ``form="verbatim"`` drops both h factors, as in the published display;
    it integrates to 2T at m = 0, p = 1/2 and is kept only for comparison.
    """
    params.require_dry_friction()
    if form not in PDF2_FORMS:
        raise ConfigurationError(f"form must be one of {PDF2_FORMS}")
    if _scalars(u, l):
        if l < 0:
            raise DomainError("local time must be >= 0")
        return _s.joint_u_l(u, l, params.p, params.m, params.T, form == "corrected")
    u, l = np.broadcast_arrays(_arr(u), _arr(l))
    _require(l >= 0, "local time must be >= 0")
    T, p, q, m = params.T, params.p, params.q, params.m
    inside = (u > 0) & (u < T)
    us = np.where(inside, u, 0.5 * T)
    base = math.log(2.0) - m * m * T / 2.0 + l * m
    if form == "corrected":
        s1 = base + math.log(p) + _logh(T - us, l * q)
        s2 = base + math.log(q) + _logh(us, l * p)
    else:
        s1 = base + math.log(p)
        s2 = base + math.log(q)
    val = _f_aux_scaled(us, l, p, m, s1) + _f_aux_scaled(T - us, l, q, m, s2)
    return _out(np.where(inside, val, 0.0))


def _l_scale(u, T, p, q, form="corrected"):
    # width of the l-profile: the h factors decay like exp(-l^2 (p^2/u + q^2/(T-u)) / 2);
    # without them (printed form) the slower of the two F terms sets it
    if form == "verbatim":
        return max(math.sqrt(u) / p, math.sqrt(T - u) / q)
    return 1.0 / math.sqrt(p * p / u + q * q / (T - u))


def occupation_density(u, params: ModelParams, form: str = "corrected",
                       spec: QuadratureSpec = DEFAULT_SPEC):
    """Density of the occupation time of [0, inf): the l-integral of :func:`joint_u_l`."""
    params.require_dry_friction()
    u_arr = _arr(u)
    T = params.T
    _require((u_arr > 0) & (u_arr < T), "u must lie in (0, T)")

    def one(uu):
        scale = _l_scale(uu, T, params.p, params.q, form)
        val, _ = integrate_semi_infinite(lambda l: joint_u_l(uu, l, params, form), 0.0, spec, scale=scale)
        return val

    if u_arr.ndim == 0:
        return one(float(u_arr))
    return np.vectorize(one, otypes=[float])(u_arr)


def local_time_density(l, params: ModelParams):
    """Density of L_T: 2 e^{-m^2 T/2 + lm} F(T, l, 1). Does not depend on p."""
    params.require_dry_friction()
    if _scalars(l):
        if l < 0:
            raise DomainError("local time must be >= 0")
        return _s.local_time_density(l, params.m, params.T)
    l = _arr(l)
    _require(l >= 0, "local time must be >= 0")
    m, T = params.m, params.T
    return _out(_f_aux_scaled(T, l, 1.0, m, math.log(2.0) - m * m * T / 2.0 + l * m))


def local_time_cdf(l, params: ModelParams):
    """P(L_T <= l) = Phi((l - mT)/sqrt T) - e^{2ml} Phi(-(l + mT)/sqrt T)."""
    params.require_dry_friction()
    l = _arr(l)
    m, T = params.m, params.T
    r = math.sqrt(2.0 * T)
    lc = np.maximum(l, 0.0)
    val = 0.5 * _sp.erfc((m * T - lc) / r) - 0.5 * _exp_erfc(2.0 * m * lc, (lc + m * T) / r)
    return _out(np.where(l < 0, 0.0, np.clip(val, 0.0, 1.0)))


# -- tabulated occupation law -------------------------------------------------


class OccupationLaw:
    """Occupation density and CDF tabulated on a sine-mapped grid.

    u = T sin^2(theta/2) turns the (u (T - u))^{-1/2} endpoint behaviour into
    a smooth bounded integrand in theta. The l-integral is done for all
    nodes at once by vector adaptive quadrature; the CDF is accumulated with
    Gauss-Legendre panels in theta and interpolated monotonically.
    """

    def __init__(self, params: ModelParams, form: str = "corrected", panels: int = 64,
                 order: int = 8, spec: QuadratureSpec = DEFAULT_SPEC):
        params.require_dry_friction()
        self.params, self.form = params, form
        T = params.T
        edges = np.linspace(0.0, math.pi, panels + 1)
        gx, gw = np.polynomial.legendre.leggauss(order)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        theta = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
        weights = (half[:, None] * gw[None, :]).ravel()
        u = T * np.sin(0.5 * theta) ** 2
        dens = self._density_nodes(u, spec)
        jac = 0.5 * T * np.sin(theta)
        panel_mass = (dens * jac * weights).reshape(panels, order).sum(axis=1)
        self.theta_edges = edges
        self.cdf_edges = np.concatenate([[0.0], np.cumsum(panel_mass)])
        self.total_mass = float(self.cdf_edges[-1])
        self._cdf = _interp.PchipInterpolator(edges, self.cdf_edges)

    def _density_nodes(self, u, spec):
        T, p, q, m = self.params.T, self.params.p, self.params.q, self.params.m
        c = min(p, q)
        mp = max(m, 0.0)
        # beyond l_max every node's integrand is below e^-80 of its peak scale
        l_max = (mp * T + math.sqrt((mp * T) ** 2 + 160.0 * T * c * c)) / (c * c)
        smallest = float(np.sqrt(np.min(np.minimum(u, T - u))))
        pts = [smallest * 2.0 ** j for j in range(0, 64) if smallest * 2.0 ** j < l_max]
        f = lambda l: np.asarray(joint_u_l(u, l, self.params, self.form))
        val, _ = integrate_finite_vec(f, 0.0, l_max, spec.inflated(10.0), points=pts)
        return np.asarray(val)

    def cdf(self, u):
        u = _arr(u)
        T = self.params.T
        uc = np.clip(u / T, 0.0, 1.0)
        theta = 2.0 * np.arcsin(np.sqrt(uc))
        return _out(np.clip(self._cdf(theta), 0.0, 1.0))
