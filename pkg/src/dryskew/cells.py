"""Probability masses of histogram cells under the analytic joint laws."""

from __future__ import annotations

import math

import numpy as np

from . import analytic
from .params import ModelParams
from .quadrature import QuadratureSpec, integrate_finite_vec

CELL_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9)


def _gl(order):
    return np.polynomial.legendre.leggauss(order)


def x_l_cell_masses(params: ModelParams, x_edges, l_edges, order: int = 10) -> np.ndarray:
    """Masses of joint_x_l over rectangular cells, by tensor Gauss-Legendre.

    The density is smooth inside each cell as long as 0 is an x edge (the
    branch kink sits on it); cells straddling 0 are split there.
    """
    x_edges, l_edges = np.asarray(x_edges, float), np.asarray(l_edges, float)
    gx, gw = _gl(order)
    out = np.zeros((len(x_edges) - 1, len(l_edges) - 1))

    def nodes(a, b):
        return 0.5 * (a + b) + 0.5 * (b - a) * gx, 0.5 * (b - a) * gw

    for i, (xa, xb) in enumerate(zip(x_edges[:-1], x_edges[1:])):
        pieces = [(xa, 0.0), (0.0, xb)] if xa < 0.0 < xb else [(xa, xb)]
        for a, b in pieces:
            xn, xw = nodes(a, b)
            for j, (la, lb) in enumerate(zip(l_edges[:-1], l_edges[1:])):
                ln, lw = nodes(la, lb)
                dens = analytic.joint_x_l(xn[:, None], ln[None, :], params)
                out[i, j] += float(xw @ dens @ lw)
    return out


def u_l_cell_masses(params: ModelParams, u_edges, l_edges, form: str = "corrected",
                    panels: int = 4, order: int = 8, spec: QuadratureSpec = CELL_SPEC):
    """Masses of joint_u_l over cells, plus the mass beyond the last l edge per u-bin.

    Returns ``(cells, l_overflow)`` with shapes (nu, nl) and (nu,). In u the
    sine map u = T sin^2(theta/2) smooths the endpoint behaviour; in l each
    bin is integrated adaptively for all u-nodes at once.
    """
    T = params.T
    u_edges, l_edges = np.asarray(u_edges, float), np.asarray(l_edges, float)
    th_edges = 2.0 * np.arcsin(np.sqrt(np.clip(u_edges / T, 0.0, 1.0)))
    gx, gw = _gl(order)
    thetas, weights, owner = [], [], []
    for i, (a, b) in enumerate(zip(th_edges[:-1], th_edges[1:])):
        sub = np.linspace(a, b, panels + 1)
        for c, d in zip(sub[:-1], sub[1:]):
            thetas.append(0.5 * (c + d) + 0.5 * (d - c) * gx)
            weights.append(0.5 * (d - c) * gw)
            owner.append(np.full(order, i))
    theta = np.concatenate(thetas)
    w = np.concatenate(weights) * 0.5 * T * np.sin(theta)
    owner = np.concatenate(owner)
    u = T * np.sin(0.5 * theta) ** 2

    p, q, m = params.p, params.q, params.m
    c = min(p, q)
    mp = max(m, 0.0)
    l_max = max((mp * T + math.sqrt((mp * T) ** 2 + 160.0 * T * c * c)) / (c * c), l_edges[-1] * 2)
    smallest = float(np.sqrt(np.min(np.minimum(u, T - u))))

    f = lambda l: np.asarray(analytic.joint_u_l(u, l, params, form))
    bounds = list(zip(l_edges[:-1], l_edges[1:])) + [(l_edges[-1], l_max)]
    per_node = []
    for a, b in bounds:
        pts = [smallest * 2.0 ** j for j in range(0, 64) if a < smallest * 2.0 ** j < b]
        val, _ = integrate_finite_vec(f, a, b, spec, points=pts or None)
        per_node.append(np.asarray(val))
    per_node = np.stack(per_node, axis=1) * w[:, None]
    masses = np.zeros((len(u_edges) - 1, len(bounds)))
    np.add.at(masses, owner, per_node)
    return masses[:, :-1], masses[:, -1]
