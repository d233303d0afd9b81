import math

import numpy as np
import pytest
from scipy import stats as sst

from dryskew import stats, validate
from dryskew.errors import DomainError
from dryskew.params import ModelParams
from dryskew.simulate import LatticeConfig
from dryskew.validate import Check, ValidationReport

DF = ModelParams.dry_friction


# -- KS ------------------------------------------------------------------------


def test_ks_perfect_quantiles():
    n = 1000
    sample = sst.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    assert stats.ks_distance(sample, sst.norm.cdf) <= 0.5 / n + 1e-12


def test_ks_constant_sample_at_median():
    assert stats.ks_distance(np.zeros(50), sst.norm.cdf) == pytest.approx(0.5)
    c = 1.0
    assert stats.ks_distance(np.full(10, c), sst.norm.cdf) == pytest.approx(max(sst.norm.cdf(c), 1 - sst.norm.cdf(c)))


def test_ks_uniform_seeds():
    # 1.36/sqrt(n) is the 95% Kolmogorov quantile, so about 95 of 100 seeds fall
    # below it (>= 88 with overwhelming probability); >= 99/100 holds at 1.95
    n = 100_000
    ident = lambda x: np.clip(x, 0.0, 1.0)
    d = np.array([stats.ks_distance(np.random.default_rng(s).uniform(size=n), ident) for s in range(100)])
    assert np.sum(d < 1.36 / math.sqrt(n)) >= 88
    assert np.sum(d < 1.95 / math.sqrt(n)) >= 99
    assert sst.kstwobign.sf(1.36) == pytest.approx(0.05, abs=0.002)


def test_ks_matches_scipy_and_errors():
    x = np.random.default_rng(1).normal(size=500)
    assert stats.ks_distance(x, sst.norm.cdf) == pytest.approx(sst.kstest(x, "norm").statistic, abs=1e-14)
    with pytest.raises(DomainError):
        stats.ks_distance([], sst.norm.cdf)
    with pytest.raises(DomainError):
        stats.ks_distance_binned([0, 1], [0], sst.norm.cdf)


def test_ks_binned_equals_sample_at_edges():
    rng = np.random.default_rng(2)
    x = rng.uniform(size=1000)
    edges = np.linspace(0, 1, 11)
    counts = np.histogram(x, edges)[0]
    emp = np.concatenate([[0], np.cumsum(counts) / 1000])
    assert stats.ks_distance_binned(edges, counts, lambda e: e) == pytest.approx(np.max(np.abs(emp - edges)))


# -- chi-square ------------------------------------------------------------------


def test_chi2_exact_counts_is_zero():
    m = np.array([0.2, 0.3, 0.5])
    stat, dof = stats.chi2_statistic(1000 * m, m, 1000)
    assert stat == 0.0 and dof == 2


def test_chi2_one_unit_transfer():
    E = 50.0
    stat, _ = stats.chi2_statistic([E + 1, E - 1], [0.5, 0.5], 2 * E)
    assert stat == pytest.approx(2 / E)


def test_chi2_multinomial_band():
    n, k = 100_000, 50
    masses = np.random.default_rng(0).dirichlet(np.ones(k))
    inside = 0
    for s in range(100):
        obs = np.random.default_rng(1000 + s).multinomial(n, masses)
        stat, dof = stats.chi2_statistic(obs, masses, n)
        inside += abs(stat - dof) <= 4 * math.sqrt(2 * dof)
    assert inside >= 99


def test_chi2_merging():
    masses = np.array([0.5, 0.49, 0.004, 0.003, 0.003])
    o, e = stats.merge_small_cells([50, 49, 1, 0, 0], masses, 100)
    assert o.sum() == 100 and e.sum() == pytest.approx(100)
    assert np.all(e >= 5)
    with pytest.raises(DomainError):
        stats.chi2_statistic([3, 1], [0.9, 0.1], 4)


# -- report ------------------------------------------------------------------------


def test_check_pass_rule():
    assert Check("a", "ks", 0.005, 0.01).passed
    assert not Check("a", "ks", 0.02, 0.01).passed
    assert Check("b", "chi2", 0.3, 0.01, "ge").passed
    assert Check("c", "normalization", 2.0 + 1e-9, 1e-8, "eq", target=2.0).passed
    assert not Check("d", "ks", float("nan"), 1.0).passed
    with pytest.raises(ValueError):
        Check("e", "other", 0, 0)
    with pytest.raises(ValueError):
        Check("f", "ks", 0, 0, "eq")


def test_dither_and_split_are_deterministic():
    a = validate.dither(np.zeros(5), 0.01, 7, 1)
    np.testing.assert_array_equal(a, validate.dither(np.zeros(5), 0.01, 7, 1))
    assert np.all(np.abs(a) < 0.01)
    assert not np.array_equal(a, validate.dither(np.zeros(5), 0.01, 7, 2))
    s = {"u": np.array([0.5]), "l_visits": np.array([1.0])}
    got = validate.split_occupation(s, DF(0.7, 0.5), LatticeConfig(delta=0.01))
    assert got[0] == pytest.approx(0.5 - 0.3 * 0.01)


def test_ks_threshold():
    assert validate.ks_threshold(0.01, 200_000) == 0.01
    assert validate.ks_threshold(0.01, 10_000) == pytest.approx(3 * 1.358 / 100)


CI_CFG = LatticeConfig(delta=0.02, path_budget=20_000)


@pytest.fixture(scope="module")
def ci_report():
    return validate.run_full_validation(DF(0.5, 0.0), CI_CFG, profile="ci")


def test_ci_profile_passes(ci_report):
    assert ci_report.passed, ci_report.table()
    names = [c.name for c in ci_report.checks]
    assert len(names) == len(set(names))
    for needed in ("special.convolution_first", "analytic.mass_joint_u_l", "analytic.arcsine", "mc.ks_x"):
        assert needed in names


def test_report_round_trip(ci_report):
    s = ci_report.to_json()
    back = ValidationReport.from_json(s)
    assert back.to_json() == s
    assert ci_report.config["lattice"]["seed"] == CI_CFG.seed


def test_report_deterministic(ci_report):
    again = validate.run_full_validation(DF(0.5, 0.0), CI_CFG, profile="ci")
    assert again.to_json() == ci_report.to_json()


def test_zero_tolerance_fails_by_name():
    r = validate.run_full_validation(DF(0.5, 0.0), CI_CFG, profile="ci", tol=0.0)
    assert not r.passed
    assert any(n.startswith("analytic.mass") for n in r.failures())


def test_verbatim_form_fails_normalization():
    r = validate.run_full_validation(DF(0.5, 0.0), CI_CFG, profile="ci", form="verbatim")
    c = r["analytic.mass_joint_u_l"]
    assert not c.passed
    assert c.observed == pytest.approx(2.0, abs=1e-6)


def test_bad_profile():
    from dryskew.errors import ConfigurationError
    with pytest.raises(ConfigurationError):
        validate.run_full_validation(DF(0.5, 0.0), CI_CFG, profile="nightly")
