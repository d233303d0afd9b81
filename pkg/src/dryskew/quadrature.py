"""Adaptive integration on finite and semi-infinite intervals.

The adaptive Gauss-Kronrod engine is QUADPACK (``scipy.integrate.quad``);
this module adds the pieces the densities here need on top of it:
endpoint substitution for inverse-square-root singularities, a bracketing
tail truncation for rapidly decaying integrands, and nested composition for
the 2-D to 4-D normalization checks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _si

from .errors import ConvergenceError, DivergenceError, DomainError

ENDPOINT_STRATEGIES = ("none", "sqrt")
TAIL_STRATEGIES = ("geometric", "exp")


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    endpoint_strategy: str = "none"
    tail_strategy: str = "geometric"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.endpoint_strategy not in ENDPOINT_STRATEGIES:
            raise DomainError(f"unknown endpoint_strategy {self.endpoint_strategy!r}")
        if self.tail_strategy not in TAIL_STRATEGIES:
            raise DomainError(f"unknown tail_strategy {self.tail_strategy!r}")

    def inflated(self, factor: float = 10.0) -> "QuadratureSpec":
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_SPEC = QuadratureSpec()

# QUADPACK flags roundoff (ier=2) when the target is below what float64 can
# resolve; such results are accepted when the reported error is within this
# multiple of the requested tolerance.
_ACCEPT_SLACK = 10.0


def _quad(f, a, b, spec, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = _si.quad(
            f, a, b,
            epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=spec.max_subdivisions, points=points, full_output=1,
        )
    value, err = res[0], res[1]
    # scipy appends a message only when QUADPACK reports ier != 0
    failed = len(res) > 3
    if not math.isfinite(value):
        raise ConvergenceError(f"non-finite integral on [{a}, {b}]", value, err)
    target = max(spec.abs_tol, spec.rel_tol * abs(value))
    if failed and err > _ACCEPT_SLACK * target:
        raise ConvergenceError(
            f"quadrature on [{a}, {b}] did not converge (err={err:.3g}): {res[3]}",
            value, err,
        )
    return value, err


def integrate_finite(
    f: Callable[[float], float],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    points: Sequence[float] | None = None,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``; returns ``(value, error_estimate)``.

    With ``endpoint_strategy="sqrt"`` the map x = a + (b - a) sin^2(theta / 2)
    removes (x - a)^(-1/2) and (b - x)^(-1/2) singularities at either end.
    """
    if not (a < b):
        raise DomainError(f"need a < b, got [{a}, {b}]")
    if spec.endpoint_strategy == "sqrt":
        w = b - a

        def g(theta):
            s = math.sin(0.5 * theta)
            return f(a + w * s * s) * 0.5 * w * math.sin(theta)

        pts = None
        if points:
            pts = [2.0 * math.asin(math.sqrt((p - a) / w)) for p in points if a < p < b]
        return _quad(g, 0.0, math.pi, spec, pts or None)
    pts = [p for p in points if a < p < b] if points else None
    return _quad(f, a, b, spec, pts or None)


def _tail_bracket(f, a, scale, spec, max_doublings=80):
    # Probe finely near a, then geometrically outward.
    probes = [a + scale * 2.0 ** j for j in range(-12, 1)]
    peak = max(abs(f(x)) for x in probes)
    j = 0
    while True:
        b = a + scale * 2.0 ** j
        fb = abs(f(b))
        peak = max(peak, fb)
        cutoff = spec.abs_tol * 1e-2 * peak
        if fb <= cutoff and abs(f(a + scale * 2.0 ** (j + 1))) <= cutoff:
            return b, peak
        j += 1
        if j > max_doublings:
            raise DivergenceError(
                f"integrand did not decay below {cutoff:.3g} within {b:.3g}", math.nan, math.inf
            )


def integrate_semi_infinite(
    f: Callable[[float], float],
    a: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    scale: float = 1.0,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, inf)``.

    ``scale`` is the length over which the integrand varies; it seeds the
    bracket search (geometric strategy) or the map x = a - scale*log(1 - t)
    (exp strategy). The geometric strategy truncates at the first doubling
    where |f| drops below ``abs_tol * 1e-2 * peak`` and stays there.
    """
    if not (scale > 0):
        raise DomainError("scale must be > 0")
    if spec.tail_strategy == "exp":
        def g(t):
            if t >= 1.0:
                return 0.0
            return f(a - scale * math.log1p(-t)) * scale / (1.0 - t)

        return integrate_finite(g, 0.0, 1.0, replace(spec, endpoint_strategy="none"))

    b, peak = _tail_bracket(f, a, scale, spec)
    if peak == 0.0:
        return 0.0, 0.0
    # Break at the doubling points so the mass near a is resolved.
    edges = [a] + [a + scale * 2.0 ** j for j in range(-6, 200) if a + scale * 2.0 ** j < b] + [b]
    sub = replace(spec, endpoint_strategy="none")
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = _quad(f, lo, hi, sub)
        total += v
        err += e
    return total, err


def integrate_finite_vec(f, a, b, spec: QuadratureSpec = DEFAULT_SPEC, points=None):
    """Adaptive integration of an array-valued integrand (shared subdivision)."""
    if not (a < b):
        raise DomainError(f"need a < b, got [{a}, {b}]")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        value, err, info = _si.quad_vec(
            f, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
            limit=max(spec.max_subdivisions, 2000), points=points, full_output=True,
        )
    if not info.success and err > _ACCEPT_SLACK * max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(value)))):
        raise ConvergenceError(f"vector quadrature on [{a}, {b}] did not converge", value, err)
    return value, err


@dataclass(frozen=True)
class Dim:
    """One axis of a nested integral.

    ``lo``/``hi`` may be numbers or callables of the outer variables (passed
    positionally, outermost first). ``hi=inf`` selects the semi-infinite
    routine with the given ``scale`` (number or callable).
    """

    lo: float | Callable = 0.0
    hi: float | Callable = 1.0
    endpoint: str = "none"
    scale: float | Callable = 1.0
    points: tuple | Callable = ()


def _resolve(v, outer):
    return v(*outer) if callable(v) else v


def integrate_nested(
    f: Callable[..., float],
    dims: Sequence[Dim],
    spec: QuadratureSpec = DEFAULT_SPEC,
    inflation: float = 10.0,
) -> tuple[float, float]:
    """Iterated integral of ``f(x_outer, ..., x_inner)`` over ``dims`` (outermost first).

    The innermost pass runs at ``spec``; each enclosing pass loosens both
    tolerances by ``inflation``.
    """
    depth = len(dims)
    if depth == 0 or depth > 4:
        raise DomainError("nested integration supports 1 to 4 dimensions")

    def level(i, outer):
        d = dims[i]
        lvl_spec = spec.inflated(inflation ** (depth - 1 - i))
        lo, hi = _resolve(d.lo, outer), _resolve(d.hi, outer)
        if i == depth - 1:
            g = lambda x: f(*outer, x)
        else:
            g = lambda x: level(i + 1, outer + (x,))[0]
        if hi == math.inf:
            return integrate_semi_infinite(g, lo, lvl_spec, scale=_resolve(d.scale, outer))
        if not (lo < hi):
            return 0.0, 0.0
        pts = _resolve(d.points, outer)
        return integrate_finite(g, lo, hi, replace(lvl_spec, endpoint_strategy=d.endpoint), pts)

    return level(0, ())


def endpoint_breaks(lo: float, hi: float, levels: int = 20) -> tuple:
    """Breakpoints accumulating geometrically at both ends of [lo, hi].

    First-passage kernels h(s, y) with small y spike at s ~ y^2; these
    points let the adaptive pass find such spikes near either endpoint.
    """
    w = hi - lo
    pts = {lo + w * 2.0 ** -k for k in range(1, levels)}
    pts |= {hi - w * 2.0 ** -k for k in range(2, levels)}
    return tuple(sorted(p for p in pts if lo < p < hi))
