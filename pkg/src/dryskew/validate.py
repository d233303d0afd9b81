"""Evidence report: normalizations, reductions, identities and Monte Carlo agreement.

Each check has a stable identifier. ``run_full_validation`` returns a
:class:`ValidationReport` whose serialized form depends only on the inputs
(parameters, lattice configuration, seed, profile), never on timing or
thread count.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import analytic, cells, identities, normalization, simulate
from . import stats as _st
from . import special
from .errors import ConfigurationError
from .params import ModelParams
from .quadrature import QuadratureSpec, integrate_semi_infinite
from .simulate import LatticeConfig

KINDS = ("normalization", "reduction", "consistency", "ks", "chi2")
PROFILES = ("ci", "full")
COMPARISONS = ("le", "ge", "eq")

PARAM_GRID = tuple(itertools.product((0.1, 0.5, 0.9), (0.0, 0.5, 2.0), (0.25, 1.0, 4.0)))
KS_X_SETS = ((0.5, 0.0), (0.7, 0.5), (0.3, 1.0))
MC_PATHS = 200_000
CHI2_ALPHA = 0.01
VERBATIM_REJECT = 1e-6


@dataclass
class Check:
    """One named comparison.

    ``comparison`` says how ``observed`` is judged: ``le`` (observed <=
    threshold), ``ge`` (observed >= threshold) or ``eq`` (|observed - target|
    <= threshold).
    """

    name: str
    kind: str
    observed: float
    threshold: float
    comparison: str = "le"
    target: float | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown check kind {self.kind!r}")
        if self.comparison not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.comparison!r}")
        if self.comparison == "eq" and self.target is None:
            raise ValueError("equality checks need a target")
        self.observed = float(self.observed)
        self.threshold = float(self.threshold)

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.observed):
            return False
        if self.comparison == "le":
            return self.observed <= self.threshold
        if self.comparison == "ge":
            return self.observed >= self.threshold
        return abs(self.observed - self.target) <= self.threshold

    def to_dict(self) -> dict:
        return {
            "name": self.name, "kind": self.kind, "observed": self.observed,
            "threshold": self.threshold, "comparison": self.comparison,
            "target": self.target, "pass": self.passed, "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["name"], d["kind"], d["observed"], d["threshold"], d["comparison"],
                   d["target"], d.get("metadata", {}))


@dataclass
class ValidationReport:
    checks: list
    params: ModelParams
    config: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "params": self.params.to_dict(),
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        p = d["params"]
        params = ModelParams(p["p"], p["m1"], p["m2"], p["T"])
        return cls([Check.from_dict(c) for c in d["checks"]], params, d["config"])

    @classmethod
    def from_json(cls, s: str) -> "ValidationReport":
        return cls.from_dict(json.loads(s))

    def table(self) -> str:
        rows = [("check", "kind", "observed", "threshold", "result")]
        for c in self.checks:
            op = {"le": "<=", "ge": ">="}.get(c.comparison) or f"|x-{c.target:g}| <="
            rows.append((c.name, c.kind, f"{c.observed:.6g}", f"{op} {c.threshold:.3g}",
                         "PASS" if c.passed else "FAIL"))
        w = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(r[i].ljust(w[i]) for i in range(5)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * x for x in w))
        total = sum(c.passed for c in self.checks)
        lines.append(f"{total}/{len(self.checks)} checks passed")
        return "\n".join(lines)


# -- sample post-processing -------------------------------------------------------


def dither(values, delta: float, seed: int, tag: int = 0):
    """Spread lattice atoms uniformly over their cell (width 2 delta) before a KS test.

    X_T sits on a parity sub-lattice of spacing 2 delta, so its empirical CDF
    has jumps of size up to about delta/sqrt(T); uniform jitter on
    (-delta, delta) removes them without moving mass more than one cell.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(tag)]))
    values = np.asarray(values, dtype=float)
    return values + rng.uniform(-delta, delta, values.size)


def split_occupation(samples: dict, params: ModelParams, config: LatticeConfig):
    """Occupation of [0, inf) with site-0 time shared q : p between the half-lines.

    The lattice convention books every step at site 0 as nonnegative, which
    biases U upward by about q * delta * L_T. Near the origin the skew
    process spends time on the two sides in ratio p : q, so that share of the
    site-0 time is moved back.
    """
    time_at_zero = samples["l_visits"] * config.delta
    return samples["u"] - params.q * time_at_zero


def ks_threshold(base: float, n: int) -> float:
    """``base`` at the reference budget, widened for small runs to 3x the 95% null value."""
    return max(base, 3.0 * 1.358 / math.sqrt(n))


# -- check builders ---------------------------------------------------------------


def _dev(pairs):
    return max(abs(a - b) for a, b in pairs)


def _special_checks(tol):
    out = []
    # h(., y) is a probability density in s; s = y^2/z^2 maps it to a half-normal in z
    spec = QuadratureSpec(1e-12, 1e-10, tail_strategy="exp")
    devs = []
    for y in (0.5, 1.0, 3.0):
        def g(z, y=y):
            if z <= 0:
                return 0.0
            s = y * y / (z * z)
            return special.first_passage_density(s, y) * 2.0 * y * y / z ** 3
        val, _ = integrate_semi_infinite(g, 0.0, spec, scale=1.0)
        devs.append(abs(val - 1.0))
    out.append(Check("special.h_unit_mass", "normalization", max(devs), tol(1e-8),
                     metadata={"y": [0.5, 1.0, 3.0]}))

    grid = list(itertools.product((0.25, 1.0, 4.0), (0.2, 1.0, 3.0), (0.1, 0.5, 0.9)))
    out.append(Check("special.convolution_first", "consistency",
                     _dev(identities.first_identity(t, l, p) for t, l, p in grid), tol(1e-8),
                     metadata={"grid": "t x l x p = {0.25,1,4} x {0.2,1,3} x {0.1,0.5,0.9}"}))
    grid2 = list(itertools.product((0.25, 1.0, 4.0), (0.2, 1.0, 3.0), (-1.5, 0.3, 1.0)))
    out.append(Check("special.convolution_second", "consistency",
                     _dev(identities.second_identity(T, l, x) for T, l, x in grid2), tol(1e-8),
                     metadata={"grid": "T x l x x = {0.25,1,4} x {0.2,1,3} x {-1.5,0.3,1}"}))

    z = np.linspace(-6.0, 6.0, 1201)
    e, ec = np.asarray(special.erf(z)), np.asarray(special.erfc(z))
    bad = int(np.sum(np.diff(e) < 0) + np.sum(ec <= 0) + np.sum(np.diff(ec) > 0))
    out.append(Check("special.erf_erfc_monotone", "reduction", bad, 0,
                     metadata={"grid": "[-6, 6] x 1201"}))
    return out


def _reduction_checks(params, tol):
    out = []
    P0 = ModelParams.dry_friction(0.5, 0.0, 1.0)
    x = np.linspace(-4.0, 4.0, 101)
    dev = np.max(np.abs(analytic.marginal_density(x, P0) - special.gaussian_pdf(1.0, x)))
    out.append(Check("analytic.zero_drift_marginal", "reduction", dev, tol(1e-12)))
    xs, ls = np.meshgrid(np.linspace(-3.0, 3.0, 21), np.linspace(0.0, 3.0, 21), indexing="ij")
    dev = np.max(np.abs(analytic.joint_x_l(xs, ls, P0)
                        - special.first_passage_density(1.0, ls + np.abs(xs))))
    out.append(Check("analytic.zero_drift_joint_x_l", "reduction", dev, tol(1e-12)))
    u = np.linspace(0.05, 0.95, 19)
    dev = np.max(np.abs(analytic.occupation_density(u, P0) - 1.0 / (math.pi * np.sqrt(u * (1 - u)))))
    out.append(Check("analytic.arcsine", "reduction", dev, tol(1e-6)))

    T = params.T
    flip = ModelParams.dry_friction(params.q, params.m, T)
    # the density jumps at 0 when p != 1/2 and both sides take the x >= 0
    # branch there, so the reflection is checked off the origin
    xg = np.linspace(-3.0, 3.0, 60) * math.sqrt(T)
    dev = np.max(np.abs(analytic.marginal_density(xg, params) - analytic.marginal_density(-xg, flip)))
    out.append(Check("analytic.skew_symmetry_marginal", "reduction", dev, tol(1e-12)))
    ug = T * np.array([0.1, 0.3, 0.5, 0.7, 0.9])
    dev = np.max(np.abs(analytic.occupation_density(ug, params)
                        - analytic.occupation_density(T - ug, flip)))
    out.append(Check("analytic.skew_symmetry_occupation", "reduction", dev, tol(1e-8)))
    return out


def _nonnegativity_check():
    worst = 0.0
    for p, m, T in PARAM_GRID:
        P = ModelParams.dry_friction(p, m, T)
        s = math.sqrt(T)
        x = np.linspace(-4, 4, 41) * s
        l = np.linspace(0, 4, 21) * s
        u = np.linspace(0.02, 0.98, 25) * T
        t = np.linspace(0.02, 1.0, 25) * T
        vals = [
            analytic.marginal_density(x, P),
            analytic.joint_x_l(x[:, None], l[None, :], P),
            analytic.joint_tau_x_l(t[:, None], x[None, :], 0.7 * s, P),
            analytic.joint_u_x_l(u[:, None], x[None, :], 0.7 * s, P),
            analytic.joint_u_l(u[:, None], l[None, :], P),
            analytic.local_time_density(l, P),
            analytic.joint_tau_v_x_l(t, 0.5 * t, 0.3 * s, 0.7 * s, P),
        ]
        worst = min(worst, min(float(np.min(v)) for v in vals))
    return Check("analytic.nonnegative", "reduction", max(0.0, -worst), 0.0,
                 metadata={"grid": "p x m x T = {0.1,0.5,0.9} x {0,0.5,2} x {0.25,1,4}"})


def _chain_checks(params, tol):
    out = []
    T = params.T
    s = math.sqrt(T)
    chains = []
    for p, m in ((0.5, 0.0), (0.7, 0.5), (0.3, 1.0)):
        P = ModelParams.dry_friction(p, m, 1.0)
        chains += [identities.l_step(x, P) for x in (-2.0, -0.5, 0.0, 0.5, 2.0)]
    out.append(Check("analytic.marginal_chain", "consistency", _dev(chains), tol(1e-8),
                     metadata={"x": [-2, -0.5, 0, 0.5, 2], "pm": [[0.5, 0], [0.7, 0.5], [0.3, 1.0]]}))
    steps = {
        "analytic.chain_v": [identities.v_step(a * T, b * s, c * s, params)
                             for a, b, c in ((0.7, 0.3, 0.8), (0.4, -0.5, 1.2), (0.9, 1.1, 0.3))],
        "analytic.chain_t": [identities.t_step(a * s, b * s, params)
                             for a, b in ((-0.4, 1.2), (0.3, 0.5), (1.5, 0.2))],
        "analytic.chain_x": [identities.x_step(a * s, params) for a in (0.2, 1.0, 3.0)],
        "analytic.chain_l": [identities.l_step(a * s, params) for a in (-1.0, 0.0, 0.5)],
        "analytic.chain_occupation_t": [
            identities.occupation_t_step(a * T, b * s, c * s, params)
            for a, b, c in ((0.6, 0.4, 0.9), (0.3, -0.7, 0.5), (0.8, 1.5, 1.4))],
        "analytic.chain_occupation_x": [
            identities.occupation_x_step(a * T, b * s, params)
            for a, b in ((0.3, 0.7), (0.5, 0.2), (0.9, 2.0))],
    }
    for name, pairs in steps.items():
        out.append(Check(name, "consistency", _dev(pairs), tol(1e-6)))
    out.append(Check("analytic.occupation_chain", "consistency",
                     _dev(identities.occupation_xl_step(a * T, params) for a in (0.1, 0.5, 0.85)),
                     tol(1e-6)))
    out.append(Check("analytic.cross_marginal", "consistency",
                     _dev(identities.u_step(a * s, params) for a in (0.2, 1.0, 3.0)), tol(1e-6)))
    return out


def _mass_check(name, fn, tol_value, tol, *args):
    val, err = fn(*args)
    return Check(name, "normalization", val, tol(tol_value), "eq", 1.0,
                 metadata={"quadrature_error": float(err)})


def _normalization_checks(params, form, tol):
    return [
        _mass_check("analytic.mass_marginal", normalization.marginal_mass, 1e-8, tol, params),
        _mass_check("analytic.mass_joint_x_l", normalization.joint_x_l_mass, 1e-6, tol, params),
        _mass_check("analytic.mass_joint_u_l", normalization.joint_u_l_mass, 1e-5, tol, params, form),
        _mass_check("analytic.mass_occupation", normalization.occupation_mass, 1e-5, tol, params, form),
        _mass_check("analytic.mass_local_time", normalization.local_time_mass, 1e-8, tol, params),
    ]


def _erratum_mass_check(tol):
    P0 = ModelParams.dry_friction(0.5, 0.0, 1.0)
    mass, _ = normalization.joint_u_l_mass(P0, "verbatim")
    return Check("analytic.erratum_verbatim_mass", "normalization", mass, tol(1e-5), "eq", 2.0 * P0.T,
                 metadata={"note": "printed form integrates to 2T at m = 0, p = 1/2",
                           "margin_over_tolerance": abs(mass - 1.0) / 1e-5})


def _grid_mass_check(tol):
    worst = {}
    fns = {
        "marginal": (normalization.marginal_mass, 1e-8),
        "joint_x_l": (normalization.joint_x_l_mass, 1e-6),
        "joint_u_l": (normalization.joint_u_l_mass, 1e-5),
        "occupation": (normalization.occupation_mass, 1e-5),
        "local_time": (normalization.local_time_mass, 1e-8),
    }
    ratio = 0.0
    for p, m, T in PARAM_GRID:
        P = ModelParams.dry_friction(p, m, T)
        for name, (fn, t) in fns.items():
            d = abs(fn(P)[0] - 1.0)
            worst[name] = max(worst.get(name, 0.0), d)
            ratio = max(ratio, d / tol(t) if tol(t) > 0 else math.inf if d > 0 else 0.0)
    return Check("analytic.mass_grid", "normalization", ratio, 1.0,
                 metadata={"observed_is": "max |mass - 1| / tolerance over 81 points x 5 laws",
                           "worst_abs_deviation": worst})


def _high_dim_checks(tol):
    P1 = ModelParams.dry_friction(0.7, 0.5, 1.0)
    P2 = ModelParams.dry_friction(0.5, 0.5, 1.0)
    Pg = ModelParams(0.7, -0.5, 1.0, 1.0)
    printed, _ = normalization.joint_tau_v_x_l_mass(Pg, "printed")
    general = _mass_check("analytic.mass_general_drift", normalization.joint_tau_v_x_l_mass,
                          2e-3, tol, Pg, "occupation")
    general.metadata["printed_weight_mass"] = printed
    general.metadata["note"] = ("drift weight charged over total occupation; "
                                "the printed weight (pre-zero occupation) loses mass when m1^2 != m2^2")
    return [
        _mass_check("analytic.mass_tau_v_x_l", normalization.joint_tau_v_x_l_mass, 2e-3, tol, P1),
        _mass_check("analytic.mass_tau_u_x_l", normalization.joint_tau_u_x_l_mass, 2e-3, tol, P2),
        _mass_check("analytic.mass_u_x_l", normalization.joint_u_x_l_mass, 1e-4, tol, P2),
        general,
    ]


# -- Monte Carlo checks --------------------------------------------------------


class _Runs:
    """Memoized simulations keyed by (p, m, T, delta, K, paths)."""

    def __init__(self, config: LatticeConfig):
        self.config = config
        self._cache = {}

    def get(self, params: ModelParams, delta=None, paths=None, K=None):
        c = self.config
        cfg = LatticeConfig(delta=delta or c.delta, epsilon_factor=K or c.epsilon_factor,
                            seed=c.seed, path_budget=paths or c.path_budget, threads=c.threads)
        key = (params.p, params.m, params.T, cfg.delta, cfg.epsilon_factor, cfg.path_budget)
        if key not in self._cache:
            self._cache[key] = (simulate.run_monte_carlo(params, cfg), cfg)
        return self._cache[key]


def _ks_x(summary, cfg, params):
    x = dither(summary.samples["x_T"], cfg.delta, cfg.seed)
    return _st.ks_distance(x, lambda z: analytic.marginal_cdf(z, params))


def _mc_param_checks(params, runs):
    summ, cfg = runs.get(params)
    sm, n = summ.samples, summ.n_paths
    meta = {"paths": n, "delta": cfg.delta, "K": cfg.epsilon_factor, "seed": cfg.seed}
    out = [Check("mc.ks_x", "ks", _ks_x(summ, cfg, params), ks_threshold(0.01, n), metadata=meta)]
    law = analytic.OccupationLaw(params)
    out.append(Check("mc.ks_u", "ks", _st.ks_distance(sm["u"], law.cdf),
                     ks_threshold(0.02, n), metadata=meta))
    out.append(Check("mc.ks_local_time", "ks",
                     _st.ks_distance(sm["l_T"], lambda l: analytic.local_time_cdf(l, params)),
                     ks_threshold(0.02, n), metadata=meta))
    out.append(Check("mc.visits_vs_window", "ks", _st.ks_two_sample(sm["l_visits"], sm["l_T"]),
                     ks_threshold(0.02, n), metadata=meta))
    T = params.T
    tau, u, v = sm["tau"], sm["u"], sm["v"]
    bad = int(np.sum((v < 0) | (v > tau) | (tau > T + 1e-12)))
    out.append(Check("mc.v_le_tau_le_T", "consistency", bad, 0, metadata=meta))
    ident = np.where(sm["x_T"] >= 0, v + (T - tau), v)
    out.append(Check("mc.occupation_identity", "consistency", float(np.max(np.abs(u - ident))),
                     2.0 * cfg.delta ** 2, metadata={**meta, "slack": "one lattice step"}))
    if params.m == 0:
        # sign law of skew BM: P(X_T > 0) = p. The lattice puts an O(delta)
        # atom at 0 that the limit does not have, so condition on x_T != 0.
        nonzero = sm["x_T"] != 0
        n_nz = int(np.count_nonzero(nonzero))
        frac = float(np.mean(sm["x_T"][nonzero] > 0))
        se = math.sqrt(params.p * params.q / n_nz)
        out.append(Check("mc.sign_law", "ks", abs(frac - params.p) / se, 3.0,
                         metadata={**meta, "observed_is": "|P(x_T>0 | x_T!=0) - p| in standard errors",
                                   "atom_at_zero": float(1.0 - n_nz / n)}))
    return out


def _mc_fixed_checks(runs, tol):
    out = []
    for p, m in KS_X_SETS:
        P = ModelParams.dry_friction(p, m, 1.0)
        summ, cfg = runs.get(P, delta=0.005, paths=MC_PATHS)
        out.append(Check(f"mc.ks_x_p{p}_m{m}", "ks", _ks_x(summ, cfg, P), 0.01,
                         metadata={"paths": MC_PATHS, "delta": 0.005}))
    P = ModelParams.dry_friction(0.7, 0.5, 1.0)
    summ, cfg = runs.get(P, delta=0.005, paths=MC_PATHS)
    sm = summ.samples
    law = analytic.OccupationLaw(P)
    out.append(Check("mc.ks_u_p0.7_m0.5", "ks", _st.ks_distance(sm["u"], law.cdf), 0.02,
                     metadata={"paths": MC_PATHS}))
    out.append(Check("mc.ks_local_time_p0.7_m0.5", "ks",
                     _st.ks_distance(sm["l_T"], lambda l: analytic.local_time_cdf(l, P)), 0.02,
                     metadata={"paths": MC_PATHS}))

    # weak convergence: KS at delta = 0.005 no worse than at 0.01 beyond 3 sigma
    for p, m in KS_X_SETS:
        P = ModelParams.dry_friction(p, m, 1.0)
        fine = _ks_x(*runs.get(P, delta=0.005, paths=MC_PATHS), P)
        coarse = _ks_x(*runs.get(P, delta=0.01, paths=MC_PATHS), P)
        slack = 3.0 * math.sqrt(2.0) * _st.ks_null_sd(MC_PATHS)
        out.append(Check(f"mc.weak_convergence_p{p}_m{m}", "ks", fine - coarse, slack,
                         metadata={"ks_delta_0.01": coarse, "ks_delta_0.005": fine}))

    # joint (x_T, l_T) against h(T, l + |x|) at p = 1/2, m = 0
    P = ModelParams.dry_friction(0.5, 0.0, 1.0)
    summ, cfg = runs.get(P, delta=0.005, paths=MC_PATHS)
    n = 100_000
    x = dither(summ.samples["x_T"], cfg.delta, cfg.seed)[:n]
    l = summ.samples["l_T"][:n]
    ex, el = np.linspace(-3, 3, 21), np.linspace(0, 3, 21)
    H, _, _ = np.histogram2d(x, l, [ex, el])
    mass = cells.x_l_cell_masses(P, ex, el)
    stat, dof = _st.chi2_statistic(np.append(H.ravel(), n - H.sum()),
                                   np.append(mass.ravel(), 1.0 - mass.sum()), n)
    out.append(Check("mc.chi2_joint_x_l", "chi2", _st.chi2_pvalue(stat, dof), CHI2_ALPHA, "ge",
                     metadata={"stat": stat, "dof": dof, "paths": n, "observed_is": "p-value"}))
    out += erratum_chi2_checks(runs)
    return out


ERRATUM_DELTA = 0.0025


def erratum_chi2_checks(runs, paths: int = MC_PATHS):
    """(U, L_T) histogram against the corrected and the printed occupation joints.

    Uses delta = 0.0025, the site-0 split occupation and the visits local-time
    estimator: both carry O(delta) lattice bias only, whereas the window
    estimator's O(epsilon) bias alone is detectable by a 2e5-path chi^2.
    """
    P = ModelParams.dry_friction(0.5, 0.5, 1.0)
    summ, cfg = runs.get(P, delta=ERRATUM_DELTA, paths=paths)
    sm, n = summ.samples, summ.n_paths
    u = split_occupation(sm, P, cfg)
    eu, el = np.linspace(0, 1, 11), np.linspace(0, 3, 13)
    H, _, _ = np.histogram2d(u, sm["l_visits"], [eu, el])
    obs = np.append(H.ravel(), n - H.sum())
    out = []
    for form in ("corrected", "verbatim"):
        a, b = cells.u_l_cell_masses(P, eu, el, form=form)
        total = a.sum() + b.sum()
        exp = np.append(a.ravel(), b.sum()) / total
        stat, dof = _st.chi2_statistic(obs, exp, n)
        pv = _st.chi2_pvalue(stat, dof)
        meta = {"stat": stat, "dof": dof, "paths": n, "delta": cfg.delta,
                "raw_mass": float(total), "observed_is": "p-value"}
        if form == "corrected":
            out.append(Check("mc.chi2_occupation_corrected", "chi2", pv, CHI2_ALPHA, "ge", metadata=meta))
        else:
            meta["note"] = "printed form renormalized to unit mass, so rejection is about shape"
            out.append(Check("mc.chi2_occupation_verbatim_rejected", "chi2", pv, VERBATIM_REJECT, "le",
                             metadata=meta))
    return out


# -- orchestration ---------------------------------------------------------------


def run_full_validation(params: ModelParams, config: LatticeConfig | None = None,
                        profile: str = "ci", form: str = "corrected",
                        tol: float | None = None) -> ValidationReport:
    """Run the check battery and return a report.

    ``profile="ci"`` runs every deterministic check at ``params`` plus the
    fixed reductions and identities, and one simulation at ``config``.
    ``profile="full"`` adds the 3-D/4-D normalizations, the 81-point mass
    grid and the fixed-parameter Monte Carlo battery (KS sets, weak
    convergence, chi^2 tests). ``form`` selects the occupation joint used by
    the mass checks; ``tol`` replaces every non-statistical tolerance.
    """
    if profile not in PROFILES:
        raise ConfigurationError(f"profile must be one of {PROFILES}")
    if form not in analytic.PDF2_FORMS:
        raise ConfigurationError(f"form must be one of {analytic.PDF2_FORMS}")
    params.require_dry_friction()
    config = config or LatticeConfig(path_budget=100_000 if profile == "ci" else 1_000_000)
    if tol is not None and not (tol >= 0 and math.isfinite(tol)):
        raise ConfigurationError("tol must be a finite number >= 0")
    tolf = (lambda t: t) if tol is None else (lambda t: tol)

    checks = []
    checks += _special_checks(tolf)
    checks += _reduction_checks(params, tolf)
    checks.append(_nonnegativity_check())
    checks += _chain_checks(params, tolf)
    checks += _normalization_checks(params, form, tolf)
    checks.append(_erratum_mass_check(tolf))
    runs = _Runs(config)
    checks += _mc_param_checks(params, runs)
    if profile == "full":
        checks.append(_grid_mass_check(tolf))
        checks += _high_dim_checks(tolf)
        checks += _mc_fixed_checks(runs, tolf)

    names = [c.name for c in checks]
    if len(set(names)) != len(names):  # pragma: no cover - programming error
        raise RuntimeError("duplicate check identifiers")
    cfg = {"lattice": config.to_dict(), "profile": profile, "pdf2_form": form,
           "tol_override": tol, "untested_regime": params.untested_regime}
    return ValidationReport(checks, params, cfg)
