"""Goodness-of-fit statistics used to compare simulation with the closed forms."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats as _st

from .errors import DomainError


def ks_distance(sample, cdf) -> float:
    """Sup-distance between the empirical CDF of ``sample`` and ``cdf``.

    Both one-sided gaps are taken at every sample point, so ties and atoms
    are handled exactly.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("empty sample")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_distance_binned(edges, counts, cdf) -> float:
    """KS distance when only a histogram is available (gap at each bin edge)."""
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    if n == 0:
        raise DomainError("empty histogram")
    emp = np.concatenate([[0.0], np.cumsum(counts) / n])
    return float(np.max(np.abs(emp - np.asarray(cdf(np.asarray(edges, dtype=float))))))


def ks_two_sample(a, b) -> float:
    return float(_st.ks_2samp(a, b).statistic)


def ks_null_sd(n: int) -> float:
    """Standard deviation of the one-sample KS distance under the null (Kolmogorov law)."""
    return 0.2603 / math.sqrt(n)


def merge_small_cells(observed, expected_masses, n, min_expected=5.0):
    """Pool every cell with expected count below ``min_expected`` into one cell.

    If the pooled cell is still too small it is folded into the smallest
    remaining cell. Returns merged (observed, expected_counts).
    """
    obs = np.asarray(observed, dtype=float).ravel()
    exp = n * np.asarray(expected_masses, dtype=float).ravel()
    if obs.shape != exp.shape:
        raise DomainError("observed and expected shapes differ")
    if np.any(exp < 0):
        raise DomainError("expected masses must be nonnegative")
    small = exp < min_expected
    o, e = list(obs[~small]), list(exp[~small])
    if small.any():
        po, pe = obs[small].sum(), exp[small].sum()
        if pe >= min_expected or not e:
            o.append(po)
            e.append(pe)
        else:
            j = int(np.argmin(e))
            o[j] += po
            e[j] += pe
    o, e = np.array(o), np.array(e)
    keep = e > 0
    return o[keep], e[keep]


def chi2_statistic(observed, expected_masses, n, min_expected=5.0):
    """Pearson statistic after small-cell merging; returns ``(stat, dof)``."""
    o, e = merge_small_cells(observed, expected_masses, n, min_expected)
    if o.size < 2:
        raise DomainError("fewer than two cells left after merging")
    return float(np.sum((o - e) ** 2 / e)), int(o.size - 1)


def chi2_pvalue(stat: float, dof: int) -> float:
    return float(_st.chi2.sf(stat, dof))


def chi2_critical(dof: int, alpha: float) -> float:
    return float(_st.chi2.isf(alpha, dof))
