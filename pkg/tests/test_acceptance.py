"""Acceptance criteria 1-8, one test each, one printed PASS/FAIL line each."""

import contextlib
import io
import itertools
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from dryskew import analytic, cli, identities, normalization, special, stats
from dryskew.params import ModelParams
from dryskew.simulate import LatticeConfig, run_monte_carlo
from dryskew.validate import PARAM_GRID, _Runs, dither, erratum_chi2_checks

DF = ModelParams.dry_friction


def report(n, title, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}  {title}: {detail}; {elapsed:.1f}s (limit {limit:g}s)"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def test_criterion_1_zero_drift_reductions():
    t0 = time.perf_counter()
    P = DF(0.5, 0.0, 1.0)
    x = np.linspace(-4, 4, 101)
    d1 = np.max(np.abs(analytic.marginal_density(x, P) - np.exp(-x * x / 2) / math.sqrt(2 * math.pi)))
    xs, ls = np.meshgrid(np.linspace(-3, 3, 21), np.linspace(0, 3, 21), indexing="ij")
    a = ls + np.abs(xs)
    levy = a / math.sqrt(2 * math.pi) * np.exp(-a * a / 2)
    d2 = np.max(np.abs(analytic.joint_x_l(xs, ls, P) - levy))
    el = time.perf_counter() - t0
    report(1, "zero-drift reductions", d1 <= 1e-12 and d2 <= 1e-12,
           f"marginal {d1:.1e}, joint(x,l) {d2:.1e} (tol 1e-12)", el, 1)


def test_criterion_2_arcsine():
    t0 = time.perf_counter()
    u = np.linspace(0.05, 0.95, 19)
    dev = np.max(np.abs(analytic.occupation_density(u, DF(0.5, 0.0)) - 1 / (math.pi * np.sqrt(u * (1 - u)))))
    el = time.perf_counter() - t0
    report(2, "arcsine reproduction", dev <= 1e-6, f"max dev {dev:.1e} (tol 1e-6)", el, 5)


MASS_LAWS = {
    "marginal": (normalization.marginal_mass, 1e-8),
    "joint_x_l": (normalization.joint_x_l_mass, 1e-6),
    "joint_u_l": (lambda P: normalization.joint_u_l_mass(P, "corrected"), 1e-5),
    "occupation": (normalization.occupation_density_mass, 1e-5),
    "local_time": (normalization.local_time_mass, 1e-8),
}


def test_criterion_3_normalization_grid():
    t0 = time.perf_counter()
    worst = {k: 0.0 for k in MASS_LAWS}
    for p, m, T in PARAM_GRID:
        P = DF(p, m, T)
        for k, (fn, _) in MASS_LAWS.items():
            worst[k] = max(worst[k], abs(fn(P)[0] - 1.0))
    el = time.perf_counter() - t0
    ok = all(worst[k] <= tol for k, (_, tol) in MASS_LAWS.items())
    detail = ", ".join(f"{k} {worst[k]:.1e}/{MASS_LAWS[k][1]:g}" for k in MASS_LAWS)
    report(3, "normalization over 81 points", ok, detail, el, 120)


def test_criterion_4_convolution_identities():
    t0 = time.perf_counter()
    d1 = d2 = 0.0
    for t, l, p in itertools.product((0.25, 1.0, 4.0), (0.1, 1.0, 3.0), (0.1, 0.5, 0.9)):
        a, b = identities.first_identity(t, l, p)
        d1 = max(d1, abs(a - b))
    # p does not enter the second identity; its third axis is the level x
    for T, l, x in itertools.product((0.25, 1.0, 4.0), (0.1, 1.0, 3.0), (-2.0, 0.3, 1.5)):
        a, b = identities.second_identity(T, l, x)
        d2 = max(d2, abs(a - b))
    el = time.perf_counter() - t0
    report(4, "convolution identities", max(d1, d2) <= 1e-8,
           f"first {d1:.1e}, second {d2:.1e} (tol 1e-8, 27 points each)", el, 10)


def test_criterion_5_consistency_chain():
    t0 = time.perf_counter()
    P = DF(0.7, 0.5, 1.0)
    steps = {
        "v": [identities.v_step(t, x, l, P) for t, x, l in ((0.8, 0.4, 1.0), (0.5, -0.3, 0.5), (0.3, 1.2, 2.0))],
        "t": [identities.t_step(x, l, P) for x, l in ((0.4, 1.0), (-0.3, 0.5), (1.2, 0.2))],
        "x": [identities.x_step(l, P) for l in (0.1, 0.8, 2.0)],
        "l": [identities.l_step(x, P) for x in (-0.8, 0.3, 1.5)],
    }
    worst = {k: max(abs(a - b) for a, b in v) for k, v in steps.items()}
    el = time.perf_counter() - t0
    report(5, "consistency chain", max(worst.values()) <= 1e-6,
           ", ".join(f"{k}-step {d:.1e}" for k, d in worst.items()) + " (tol 1e-6)", el, 60)


@pytest.mark.slow
def test_criterion_6_monte_carlo_agreement():
    t0 = time.perf_counter()
    cfg = LatticeConfig(delta=0.005, path_budget=200_000)
    parts, ok = [], True
    for p, m in ((0.5, 0.0), (0.7, 0.5), (0.3, 1.0)):
        P = DF(p, m, 1.0)
        s = run_monte_carlo(P, cfg).samples
        x = dither(s["x_T"], cfg.delta, cfg.seed)
        d = stats.ks_distance(x, lambda z: analytic.marginal_cdf(z, P))
        ok &= d < 0.01
        parts.append(f"x({p},{m}) {d:.4f}")
        if (p, m) == (0.7, 0.5):
            du = stats.ks_distance(s["u"], analytic.OccupationLaw(P).cdf)
            dl = stats.ks_distance(s["l_T"], lambda l: analytic.local_time_cdf(l, P))
            ok &= du < 0.02 and dl < 0.02
            parts += [f"U {du:.4f}", f"L {dl:.4f}"]
    el = time.perf_counter() - t0
    report(6, "Monte Carlo KS", ok, ", ".join(parts) + " (0.01 / 0.02)", el, 300)


@pytest.mark.slow
def test_criterion_7_erratum_discrimination():
    t0 = time.perf_counter()
    P0 = DF(0.5, 0.0, 1.0)
    verbatim, _ = normalization.joint_u_l_mass(P0, "verbatim")
    margin = abs(verbatim - 1.0) / 1e-5
    corrected = max(abs(normalization.joint_u_l_mass(DF(p, m, T))[0] - 1.0) for p, m, T in PARAM_GRID)
    runs = _Runs(LatticeConfig())
    chk = {c.name: c for c in erratum_chi2_checks(runs, 200_000)}
    pc = chk["mc.chi2_occupation_corrected"].observed
    pv = chk["mc.chi2_occupation_verbatim_rejected"].observed
    ok = (abs(verbatim - 2 * P0.T) < 1e-5 and margin > 1e3 and corrected <= 1e-5
          and pc >= 0.01 and pv < 1e-6)
    el = time.perf_counter() - t0
    report(7, "erratum discrimination", ok,
           f"verbatim mass {verbatim:.6f} (margin {margin:.0e}x tol), corrected grid dev {corrected:.1e}, "
           f"chi2 p corrected {pc:.3g}, verbatim {pv:.3g}", el, 300)


def _payload(tmp_path, name, argv):
    out = tmp_path / name
    with contextlib.redirect_stderr(io.StringIO()):
        code = cli.main([*argv, "--out", str(out)])
    return code, out.read_bytes()


def test_criterion_8_determinism(tmp_path):
    t0 = time.perf_counter()
    sim = ["simulate", "--p", "0.7", "--m", "0.5", "--delta", "0.01", "--paths", "20000", "--seed", "99",
           "--format", "json"]
    val = ["validate", "--p", "0.7", "--m", "0.5", "--delta", "0.01", "--paths", "20000", "--seed", "99",
           "--format", "json"]
    outs = {}
    for tag, argv in (("sim", sim), ("val", val)):
        for i, threads in enumerate(("1", "1", "4")):
            outs[tag, i] = _payload(tmp_path, f"{tag}{i}", argv + ["--threads", threads])
    same = all(outs[t, 0] == outs[t, 1] == outs[t, 2] for t in ("sim", "val"))
    codes = {outs[k][0] for k in outs}
    el = time.perf_counter() - t0
    report(8, "determinism", same and codes == {0},
           f"simulate and validate byte-identical over 2 runs and 1 vs 4 threads: {same}; exit codes {sorted(codes)}",
           el, 120)
