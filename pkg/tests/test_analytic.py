import math

import mpmath as mp
import numpy as np
import pytest

from dryskew import analytic, identities, normalization, special
from dryskew.analytic import (
    OccupationLaw, f_aux, joint_tau_u_x_l, joint_tau_v_x_l, joint_tau_x_l, joint_u_l,
    joint_u_x_l, joint_x_l, local_time_cdf, local_time_density, marginal_cdf,
    marginal_density, occupation_density, skeleton_density,
)
from dryskew.errors import ConfigurationError, DomainError
from dryskew.params import ModelParams

mp.mp.dps = 40
h = special.first_passage_density
DF = ModelParams.dry_friction


def mp_marginal(x, p, m, T):
    """Closed form of the X_T density evaluated in 40-digit arithmetic."""
    x, m, T = mp.mpf(x), mp.mpf(m), mp.mpf(T)
    w = mp.mpf(p) if x >= 0 else 1 - mp.mpf(p)
    ax = abs(x)
    g = mp.exp(-(m * T + ax) ** 2 / (2 * T)) / mp.sqrt(2 * mp.pi * T)
    return 2 * w * (g + m / 2 * mp.exp(-2 * m * ax) * (1 + mp.erf((m * T - ax) / mp.sqrt(2 * T))))


def mp_f(y, l, c, m):
    y, l, c, m = map(mp.mpf, (y, l, c, m))
    return (mp.exp(-l * l * c * c / (2 * y)) / mp.sqrt(2 * mp.pi * y)
            - m / 2 * mp.erfc((l * c + m * y) / mp.sqrt(2 * y)) * mp.exp(l * m * c + m * m * y / 2))


# -- ModelParams ----------------------------------------------------------------


def test_params_validation_and_modes():
    P = DF(0.7, 0.5, 2.0)
    assert (P.m1, P.m2, P.m, P.q) == (-0.5, 0.5, 0.5, pytest.approx(0.3))
    assert P.is_dry_friction and not P.untested_regime
    assert DF(0.5, -1.0).untested_regime
    for bad in (dict(p=0.0), dict(p=1.0), dict(p=0.5, T=0.0), dict(p=0.5, m1=math.inf)):
        with pytest.raises(DomainError):
            ModelParams(**bad)
    G = ModelParams(0.5, 0.2, 0.7)
    with pytest.raises(ConfigurationError):
        G.m
    with pytest.raises(ConfigurationError):
        marginal_density(0.1, G)


# -- skeleton and general drift ----------------------------------------------------


def test_skeleton_branch_symmetry_and_zero_l():
    assert skeleton_density(0.8, 0.3, 0.5, 1.0, 0.5, 1.0) == skeleton_density(0.8, 0.3, -0.5, 1.0, 0.5, 1.0)
    assert skeleton_density(0.8, 0.3, 0.5, 0.0, 0.7, 1.0) == 0.0


def test_skeleton_product_example():
    ref = 2 * 0.7 * h(0.3, 0.7) * h(0.5, 0.3) * h(0.2, 0.4)
    assert skeleton_density(0.8, 0.3, 0.4, 1.0, 0.7, 1.0) == pytest.approx(ref, rel=1e-13)


def test_skeleton_domain_errors():
    with pytest.raises(DomainError):
        skeleton_density(0.3, 0.5, 0.1, 1.0, 0.5, 1.0)
    with pytest.raises(DomainError):
        skeleton_density(0.5, 0.3, 0.1, -1.0, 0.5, 1.0)


@pytest.mark.parametrize("pt", [(0.8, 0.3, 0.4, 1.0), (0.5, 0.1, -0.7, 0.3), (1.0, 0.9, 2.0, 2.0)])
def test_zero_drift_reduces_to_skeleton(pt):
    t, v, x, l = pt
    P = ModelParams(0.6, 0.0, 0.0, 1.0)
    assert joint_tau_v_x_l(t, v, x, l, P) == skeleton_density(t, v, x, l, 0.6, 1.0)


def test_dry_friction_exponent():
    P = DF(0.7, 0.5, 1.0)
    t, v, x, l = 0.8, 0.3, 0.4, 1.0
    ratio = joint_tau_v_x_l(t, v, x, l, P) / skeleton_density(t, v, x, l, 0.7, 1.0)
    assert math.log(ratio) == pytest.approx(-0.125 - 0.2 + 0.5, abs=1e-13)


def test_weights_agree_under_dry_friction_and_differ_otherwise():
    P = DF(0.7, 0.5)
    a = joint_tau_v_x_l(0.8, 0.3, 0.4, 1.0, P)
    assert joint_tau_v_x_l(0.8, 0.3, 0.4, 1.0, P, weight="occupation") == pytest.approx(a, rel=1e-14)
    G = ModelParams(0.7, -0.5, 1.0)
    assert joint_tau_v_x_l(0.8, 0.3, 0.4, 1.0, G) != joint_tau_v_x_l(0.8, 0.3, 0.4, 1.0, G, weight="occupation")
    with pytest.raises(ConfigurationError):
        joint_tau_v_x_l(0.8, 0.3, 0.4, 1.0, G, weight="other")


def test_array_and_scalar_paths_agree():
    P = ModelParams(0.7, -0.3, 0.9)
    t = np.array([0.8, 0.5]); v = np.array([0.3, 0.1]); x = np.array([0.4, -0.6]); l = np.array([1.0, 0.2])
    arr = joint_tau_v_x_l(t, v, x, l, P)
    for i in range(2):
        assert arr[i] == pytest.approx(joint_tau_v_x_l(float(t[i]), float(v[i]), float(x[i]), float(l[i]), P), rel=1e-13)


# -- dry-friction chain -----------------------------------------------------------


def test_joint_tau_x_l_examples():
    P0 = DF(0.5, 0.0)
    assert joint_tau_x_l(0.5, 0.5, 0.5, P0) == pytest.approx(h(0.5, 0.5) ** 2, rel=1e-14)
    assert joint_tau_x_l(0.5, 0.5, 0.0, P0) == 0.0
    a, b = identities.v_step(0.7, 0.3, 0.8, DF(0.6, 0.5))
    assert abs(a - b) < 1e-8


def test_joint_tau_x_l_negative_branch_uses_q():
    P = DF(0.7, 0.5)
    ratio = joint_tau_x_l(0.5, -0.4, 1.0, P) / joint_tau_x_l(0.5, 0.4, 1.0, P)
    assert ratio == pytest.approx(0.3 / 0.7, rel=1e-13)


def test_joint_x_l_examples():
    assert joint_x_l(0.5, 0.5, DF(0.5, 0.0)) == pytest.approx(0.2419707, abs=1e-7)
    mass, _ = normalization.joint_x_l_mass(DF(0.3, 1.0, 2.0))
    assert abs(mass - 1) < 1e-6
    a, b = identities.t_step(-0.4, 1.2, DF(0.6, 0.5))
    assert abs(a - b) < 1e-8


def test_marginal_examples():
    assert marginal_density(0.0, DF(0.5, 0.0)) == pytest.approx(0.3989423, abs=1e-7)
    assert marginal_density(0.3, DF(0.7, 0.5)) == pytest.approx(float(mp_marginal(0.3, 0.7, 0.5, 1)), rel=1e-13)
    assert marginal_density(0.3, DF(0.7, 0.5)) == pytest.approx(0.7059, abs=1e-4)
    assert marginal_density(0.3, DF(0.7, 0.5)) == marginal_density(-0.3, DF(0.3, 0.5))


@pytest.mark.parametrize("x", [-3.0, -0.4, 0.0, 0.2, 1.5, 6.0])
@pytest.mark.parametrize("pm", [(0.3, 1.0), (0.9, 2.0), (0.5, -0.5)])
def test_marginal_matches_high_precision(x, pm):
    p, m = pm
    assert marginal_density(x, DF(p, m, 1.5)) == pytest.approx(float(mp_marginal(x, p, m, 1.5)), rel=1e-12, abs=1e-300)


def test_marginal_cdf():
    for P in (DF(0.7, 0.5), DF(0.2, 2.0, 3.0), DF(0.5, 0.0)):
        big = 20 * math.sqrt(P.T) + abs(P.m) * P.T
        assert abs(marginal_cdf(big, P) - 1.0) < 1e-8
        assert marginal_cdf(-big, P) < 1e-8
        xs = np.linspace(-6, 6, 301)
        assert np.all(np.diff(marginal_cdf(xs, P)) >= 0)
    assert marginal_cdf(0.0, DF(0.5, 0.0)) == pytest.approx(0.5, abs=1e-15)
    assert marginal_cdf(-1e-300, DF(0.7, 0.0)) == pytest.approx(0.3, abs=1e-15)


def test_marginal_cdf_is_integral_of_density():
    P = DF(0.7, 0.5)
    for x in (-1.0, 0.0, 0.8):
        lo = mp.quad(lambda z: mp_marginal(z, 0.7, 0.5, 1), [-mp.inf, min(x, 0), x] if x > 0 else [-mp.inf, x])
        assert marginal_cdf(x, P) == pytest.approx(float(lo), abs=1e-12)


def test_joint_tau_u_x_l_change_of_variables():
    P = DF(0.6, 0.5)
    t, v, x, l = 0.8, 0.2, 0.5, 1.0
    assert joint_tau_u_x_l(t, 1.0 - t + v, x, l, P) == pytest.approx(joint_tau_v_x_l(t, v, x, l, P), rel=1e-13)
    assert joint_tau_u_x_l(t, v, -x, l, P) == pytest.approx(joint_tau_v_x_l(t, v, -x, l, P), rel=1e-13)
    assert joint_tau_u_x_l(0.8, 0.1, 0.5, 1.0, P) == 0.0    # x >= 0 needs u >= T - t
    assert joint_tau_u_x_l(0.5, 0.7, -0.5, 1.0, P) == 0.0   # x < 0 needs u <= t


def test_joint_u_x_l_examples():
    P = DF(0.6, 0.5)
    a, b = identities.occupation_t_step(0.6, 0.4, 0.9, P)
    assert abs(a - b) < 1e-8
    assert joint_u_x_l(0.4, 0.5, 0.0, P) == 0.0
    assert joint_u_x_l(0.0, 0.5, 1.0, P) == 0.0 and joint_u_x_l(1.0, 0.5, 1.0, P) == 0.0


def test_f_aux_examples():
    assert f_aux(1.0, 0.0, 1.0, 0.0) == pytest.approx(0.3989423, abs=1e-7)
    val = f_aux(1.0, 1.0, 0.5, 0.5)
    integral = mp.quad(lambda x: mp.mpf(h(1.0, 0.5 + float(x))) * mp.exp(-0.5 * x), [0, mp.inf])
    assert val == pytest.approx(float(integral), abs=1e-8)
    big = f_aux(1.0, 50.0, 0.5, 2.0)
    assert math.isfinite(big) and big == pytest.approx(float(mp_f(1, 50, 0.5, 2)), rel=1e-8)
    with pytest.raises(DomainError):
        f_aux(0.0, 1.0, 0.5, 0.5)


@pytest.mark.parametrize("args", [(0.3, 2.0, 0.7, 1.5), (2.0, 0.1, 0.2, -1.0), (0.01, 5.0, 0.9, 4.0), (5.0, 3.0, 0.5, 3.0)])
def test_f_aux_high_precision(args):
    assert f_aux(*args) == pytest.approx(float(mp_f(*args)), rel=1e-9, abs=1e-300)


def test_joint_u_l_examples():
    P0 = DF(0.5, 0.0)
    u, l = 0.5, 1.0
    closed = l / (4 * math.pi) * math.exp(-l * l / (8 * u * (1 - u))) / (u * (1 - u)) ** 1.5
    assert joint_u_l(u, l, P0) == pytest.approx(closed, rel=1e-13)
    assert joint_u_l(u, l, P0) == pytest.approx(0.38613, abs=1e-5)
    a, b = identities.occupation_x_step(0.3, 0.7, DF(0.7, 0.5))
    assert abs(a - b) < 1e-8
    mass, _ = normalization.joint_u_l_mass(DF(0.5, 0.5))
    assert abs(mass - 1) < 1e-5
    assert joint_u_l(0.0, 1.0, P0) == 0.0 and joint_u_l(1.0, 1.0, P0) == 0.0


def test_verbatim_form_mass_is_two_T():
    for T in (1.0, 2.0):
        mass, _ = normalization.joint_u_l_mass(DF(0.5, 0.0, T), "verbatim")
        assert mass == pytest.approx(2 * T, abs=1e-8)
    with pytest.raises(ConfigurationError):
        joint_u_l(0.5, 1.0, DF(0.5, 0.0), form="printed")


def test_occupation_density_examples():
    P0 = DF(0.5, 0.0)
    assert occupation_density(0.5, P0) == pytest.approx(2 / math.pi, abs=1e-9)
    assert occupation_density(0.2, P0) == pytest.approx(1 / (math.pi * 0.4), abs=1e-9)
    mass, _ = normalization.occupation_density_mass(DF(0.7, 0.5))
    assert abs(mass - 1) < 1e-5
    with pytest.raises(DomainError):
        occupation_density(0.0, P0)
    with pytest.raises(DomainError):
        occupation_density(1.2, P0)


@pytest.mark.parametrize("p,T", [(0.1, 1.0), (0.7, 2.0), (0.9, 0.25)])
def test_occupation_density_lamperti_law(p, T):
    # zero drift: pq T / (pi sqrt(u (T - u)) (p^2 (T - u) + q^2 u))
    q = 1 - p
    u = np.concatenate([[1e-12 * T], np.linspace(0.01, 0.99, 25) * T, [T * (1 - 1e-12)]])
    ref = p * q * T / (math.pi * np.sqrt(u * (T - u)) * (p * p * (T - u) + q * q * u))
    np.testing.assert_allclose(occupation_density(u, DF(p, 0.0, T)), ref, rtol=1e-8)


def test_occupation_mass_strong_skew():
    mass, _ = normalization.occupation_density_mass(DF(0.9, 2.0, 0.25))
    assert abs(mass - 1) < 1e-8


def test_occupation_skew_symmetry():
    P, Q = DF(0.7, 0.5, 2.0), DF(0.3, 0.5, 2.0)
    for u in (0.2, 0.9, 1.7):
        assert occupation_density(u, P) == pytest.approx(occupation_density(2.0 - u, Q), abs=1e-8)


def test_occupation_law_table():
    law = OccupationLaw(DF(0.5, 0.0))
    u = np.array([0.05, 0.25, 0.5, 0.9])
    np.testing.assert_allclose(law.cdf(u), 2 / math.pi * np.arcsin(np.sqrt(u)), atol=1e-8)
    assert law.total_mass == pytest.approx(1.0, abs=1e-10)
    assert law.cdf(0.0) == 0.0 and law.cdf(1.0) == pytest.approx(1.0, abs=1e-10)


def test_local_time_examples():
    assert local_time_density(1.0, DF(0.5, 0.0)) == pytest.approx(2 * math.exp(-0.5) / math.sqrt(2 * math.pi), abs=1e-12)
    assert local_time_density(0.8, DF(0.3, 0.5)) == local_time_density(0.8, DF(0.7, 0.5))
    mass, _ = normalization.local_time_mass(DF(0.5, 1.0, 2.0))
    assert abs(mass - 1) < 1e-8
    with pytest.raises(DomainError):
        local_time_density(-0.1, DF(0.5, 0.5))


def test_local_time_cdf_matches_density():
    P = DF(0.4, 0.7, 1.3)
    for l in (0.1, 0.9, 2.5):
        ref = mp.quad(lambda z: mp.mpf(local_time_density(float(z), P)), [0, l])
        assert local_time_cdf(l, P) == pytest.approx(float(ref), abs=1e-10)


def test_x_zero_uses_nonnegative_branch():
    P = DF(0.8, 0.5)
    assert marginal_density(0.0, P) == pytest.approx(marginal_density(1e-14, P), rel=1e-10)
    assert joint_x_l(0.0, 0.5, P) == pytest.approx(2 * 0.8 * h(1.0, 0.5) * math.exp(-0.125 + 0.25), rel=1e-13)


def test_large_drift_no_overflow():
    P = DF(0.5, 30.0, 4.0)
    vals = [marginal_density(0.01, P), joint_x_l(0.1, 100.0, P), local_time_density(150.0, P),
            joint_u_l(0.5, 100.0, P)]
    assert all(math.isfinite(v) and v >= 0 for v in vals)


def test_nonnegative_on_grid():
    for p in (0.1, 0.5, 0.9):
        for m in (0.0, 0.5, 2.0):
            for T in (0.25, 1.0, 4.0):
                P = DF(p, m, T)
                x = np.linspace(-4, 4, 41) * math.sqrt(T)
                assert np.all(marginal_density(x, P) >= 0)
                assert np.all(joint_u_l(np.linspace(0.01, 0.99, 9)[:, None] * T, np.linspace(0, 4, 9)[None, :], P) >= 0)


# -- properties ----------------------------------------------------------------------

from hypothesis import given, settings, strategies as st  # noqa: E402

probs = st.floats(0.05, 0.95)
drifts = st.floats(0.0, 3.0)
horizons = st.floats(0.1, 5.0)


@settings(max_examples=60, deadline=None)
@given(probs, drifts, horizons, st.floats(-6.0, 6.0).filter(lambda x: abs(x) > 1e-9))
def test_property_marginal_skew_reflection(p, m, T, x):
    a = marginal_density(x, DF(p, m, T))
    b = marginal_density(-x, DF(1 - p, m, T))
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@settings(max_examples=60, deadline=None)
@given(probs, drifts, horizons, st.floats(0.0, 5.0), st.floats(-5.0, 5.0))
def test_property_scalar_and_array_paths_agree(p, m, T, l, x):
    P = DF(p, m, T)
    arr = joint_x_l(np.array([x, x]), np.array([l, l]), P)
    assert arr[0] == pytest.approx(joint_x_l(x, l, P), rel=1e-13, abs=1e-300)
    la = local_time_density(np.array([l]), P)[0]
    assert la == pytest.approx(local_time_density(l, P), rel=1e-13, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(probs, drifts, horizons, st.floats(0.02, 0.98))
def test_property_joint_u_l_nonnegative_and_finite(p, m, T, frac):
    P = DF(p, m, T)
    vals = joint_u_l(frac * T, np.linspace(0.0, 6.0 * math.sqrt(T) + 2 * m * T, 25), P)
    assert np.all(np.isfinite(vals)) and np.all(vals >= 0)
