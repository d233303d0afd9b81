"""Scalar special functions and the Brownian first-passage kernel.

Every function accepts scalars or numpy arrays and returns a float for
scalar input. Error functions are thin wrappers over ``scipy.special``
(Cephes), which meets 1e-12 relative accuracy on the ranges used here.
"""

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _require_positive(s, name="s"):
    s = np.asarray(s, dtype=float)
    if np.any(~(s > 0)) or np.any(~np.isfinite(s)):
        raise DomainError(f"{name} must be finite and > 0")
    return s


def erf(z):
    return _out(_sp.erf(np.asarray(z, dtype=float)))


def erfc(z):
    """1 - erf(z) without cancellation for large positive z."""
    return _out(_sp.erfc(np.asarray(z, dtype=float)))


def erfcx(z):
    """Scaled complement exp(z**2) * erfc(z)."""
    return _out(_sp.erfcx(np.asarray(z, dtype=float)))


def log_first_passage_density(s, y):
    """Natural log of h(s, y); -inf where y == 0."""
    s = _require_positive(s)
    y = np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.log(y) - 1.5 * np.log(s) - LOG_SQRT_2PI - y * y / (2.0 * s)
    return _out(out)


def first_passage_density(s, y):
    """Density at time ``s`` of the first hitting time of 0 by BM started at ``y``.

    h(s, y) = |y| / sqrt(2 pi s^3) * exp(-y^2 / (2 s)). Underflows to exactly
    0 for s -> 0 with y != 0.
    """
    return _out(np.exp(log_first_passage_density(s, y)))


def gaussian_pdf(s, x):
    """N(0, s) density at ``x``."""
    s = _require_positive(s)
    x = np.asarray(x, dtype=float)
    return _out(np.exp(-x * x / (2.0 * s) - 0.5 * np.log(s) - LOG_SQRT_2PI))


def log_ndtr(z):
    return _out(_sp.log_ndtr(np.asarray(z, dtype=float)))
