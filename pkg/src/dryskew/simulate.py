"""Monte Carlo oracle: a skew lattice walk with dry-friction drift.

The walk lives on delta * Z with time step delta**2. Away from 0 it steps
toward the origin with probability (1 + |m| delta) / 2; at 0 it steps up
with probability p (Harrison-Shepp rule), which is what realises the
skewness in the diffusion limit. No drift bias is applied at site 0.

Functionals per path (lattice time step n holds the state k_n over
[n delta^2, (n+1) delta^2)):

* ``x_T``   terminal site times delta
* ``l_T``   symmetric window local time: time within [-eps, eps] over 2 eps,
  eps = K delta. Sites +-K sit on the window edge and count half, so the
  window covers exactly 2K lattice cells.
* ``u``     time at sites >= 0 (site 0 counts as nonnegative)
* ``tau``   last lattice time at site 0 in (0, T]; 0 if the walk never returns
* ``v``     time at sites >= 0 strictly before ``tau``
* ``l_visits``  delta times the number of steps spent at site 0, a second
  local-time estimator kept for cross-checking

Randomness is a SplitMix64 counter stream keyed by (seed, path_index), so
each path is reproducible on its own and results do not depend on the
order or number of threads that produced them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _walk_py
from .errors import ConfigurationError
from .params import ModelParams

try:
    from . import _walk as _compiled
except ImportError:  # pragma: no cover - exercised when the extension is not built
    _compiled = None

FUNCTIONALS = ("x_T", "l_T", "u", "tau", "v", "l_visits")
CSV_COLUMNS = ("path_index", "x_T", "l_T", "u", "tau", "v")


BACKENDS = ("compiled", "numpy")


def available_backends():
    return ("compiled", "numpy") if _compiled is not None else ("numpy",)


def default_backend():
    if _compiled is None or os.environ.get("DRYSKEW_PURE_PYTHON"):
        return "numpy"
    return "compiled"


def _kernel(backend):
    backend = backend or default_backend()
    if backend == "compiled":
        if _compiled is None:
            raise ConfigurationError("compiled walk kernel is not built")
        return _compiled.walk_counts
    if backend == "numpy":
        return _walk_py.walk_counts
    raise ConfigurationError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class LatticeConfig:
    delta: float = 0.005
    epsilon_factor: int = 2
    seed: int = 20240607
    path_budget: int = 100_000
    threads: int = 1

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ConfigurationError("delta must be > 0")
        if int(self.epsilon_factor) != self.epsilon_factor or self.epsilon_factor < 1:
            raise ConfigurationError("epsilon_factor must be an integer >= 1")
        if self.path_budget < 1:
            raise ConfigurationError("path_budget must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must fit in 64 unsigned bits")
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    @property
    def epsilon(self) -> float:
        return self.epsilon_factor * self.delta

    def steps(self, T: float) -> int:
        ratio = T / (self.delta * self.delta)
        n = round(ratio)
        # absorb representation error in delta (0.005**2 is not exact)
        if abs(ratio - n) > 1e-9 * max(1.0, ratio):
            n = math.floor(ratio)
        if n < 1:
            raise ConfigurationError(f"horizon T={T} is shorter than one lattice step")
        return int(n)

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "epsilon_factor": self.epsilon_factor,
            "seed": self.seed,
            "path_budget": self.path_budget,
        }


def _threshold(prob: float) -> int:
    if not 0.0 < prob < 1.0:
        raise ConfigurationError(f"step probability {prob} outside (0, 1); need |m| delta < 1")
    return min(int(prob * 2.0**64), 2**64 - 1)


def step_thresholds(params: ModelParams, config: LatticeConfig) -> tuple[int, int, int]:
    """64-bit thresholds for stepping up at sites > 0, = 0, < 0."""
    params.require_dry_friction()
    m, d = params.m, config.delta
    return _threshold((1.0 - m * d) / 2.0), _threshold(params.p), _threshold((1.0 + m * d) / 2.0)


@dataclass(frozen=True)
class PathFunctionals:
    x_T: float
    l_T: float
    u: float
    tau: float
    v: float
    l_visits: float


def functionals_from_counts(counts: np.ndarray, config: LatticeConfig) -> dict:
    """Convert kernel integer bookkeeping into the named functionals."""
    d = config.delta
    d2 = d * d
    K = config.epsilon_factor
    counts = np.asarray(counts, dtype=np.int64)
    return {
        "x_T": counts[:, 0] * d,
        "l_T": counts[:, 1] * (d / (4.0 * K)),
        "u": counts[:, 2] * d2,
        "tau": counts[:, 3] * d2,
        "v": counts[:, 4] * d2,
        "l_visits": counts[:, 5] * d,
    }


def walk_counts(params, config, first_index=0, n_paths=None, backend=None, threads=None):
    params.require_dry_friction()
    n_paths = config.path_budget if n_paths is None else n_paths
    tp, tz, tn = step_thresholds(params, config)
    kernel = _kernel(backend)
    return kernel(
        config.seed, int(first_index), int(n_paths), config.steps(params.T),
        int(config.epsilon_factor), tp, tz, tn, int(threads or config.threads),
    )


def simulate_path(params: ModelParams, config: LatticeConfig, path_index: int,
                  backend=None) -> PathFunctionals:
    counts = walk_counts(params, config, path_index, 1, backend, threads=1)
    f = functionals_from_counts(counts, config)
    return PathFunctionals(**{k: float(f[k][0]) for k in FUNCTIONALS})


# -- explicit-path reference bookkeeping (slow; used to audit the kernels) --


def lattice_path(params: ModelParams, config: LatticeConfig, path_index: int) -> np.ndarray:
    """Full site trajectory k_0..k_N of one path, from the same random stream."""
    tp, tz, tn = step_thresholds(params, config)
    n = config.steps(params.T)
    mix = _walk_py._mix
    with np.errstate(over="ignore"):
        ctr = mix(np.uint64(config.seed) ^ mix(np.uint64(path_index)))
        draws = mix(ctr + _walk_py.GAMMA * np.arange(1, n + 1, dtype=np.uint64))
    sites = np.empty(n + 1, dtype=np.int64)
    sites[0] = k = 0
    for i in range(n):
        thr = tp if k > 0 else (tn if k < 0 else tz)
        k += 1 if int(draws[i]) < thr else -1
        sites[i + 1] = k
    return sites


def local_time_estimate(window_time: float, epsilon: float) -> float:
    """Symmetric window local time: time spent in [-eps, eps] divided by 2 eps."""
    return window_time / (2.0 * epsilon)


def window_time(sites: np.ndarray, K: int, delta: float) -> float:
    """Time in [-K delta, K delta] along an explicit path, edge sites at half weight."""
    a = np.abs(np.asarray(sites)[:-1])
    cells = np.count_nonzero(a < K) + 0.5 * np.count_nonzero(a == K)
    return cells * delta * delta


def occupation_and_tau(sites: np.ndarray, delta: float) -> tuple[float, float, float]:
    """(u, tau, v) along an explicit lattice path ``sites`` = k_0..k_N."""
    sites = np.asarray(sites)
    held = sites[:-1]
    d2 = delta * delta
    zeros = np.flatnonzero(sites == 0)
    last = int(zeros[-1]) if zeros.size else 0
    u = np.count_nonzero(held >= 0) * d2
    v = np.count_nonzero(held[:last] >= 0) * d2
    return u, last * d2, v


# -- aggregation ---------------------------------------------------------------


def default_edges(params: ModelParams, bins: int = 100) -> dict:
    T = params.T
    a = 5.0 * math.sqrt(T)
    return {
        "x_T": np.linspace(-a, a, bins + 1),
        "l_T": np.linspace(0.0, a, bins + 1),
        "u": np.linspace(0.0, T, bins + 1),
        "tau": np.linspace(0.0, T, bins + 1),
        "v": np.linspace(0.0, T, bins + 1),
        "l_visits": np.linspace(0.0, a, bins + 1),
    }


def default_joint_edges(params: ModelParams) -> dict:
    s = math.sqrt(params.T)
    return {
        ("x_T", "l_T"): (np.linspace(-3.0 * s, 3.0 * s, 21), np.linspace(0.0, 3.0 * s, 21)),
        ("u", "l_T"): (np.linspace(0.0, params.T, 11), np.linspace(0.0, 3.0 * s, 13)),
    }


def _clipped_hist(values, edges):
    # end bins absorb out-of-range values so counts always sum to n
    idx = np.searchsorted(edges, values, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    return np.bincount(idx, minlength=len(edges) - 1).astype(np.int64)


@dataclass
class EmpiricalSummary:
    params: ModelParams
    config: LatticeConfig
    n_paths: int
    histograms: dict
    moments: dict
    joint_histograms: dict
    samples: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "lattice": self.config.to_dict(),
            "n_paths": self.n_paths,
            "steps": self.config.steps(self.params.T),
            "moments": self.moments,
            "histograms": {
                k: {"edges": [float(e) for e in h["edges"]], "counts": [int(c) for c in h["counts"]]}
                for k, h in self.histograms.items()
            },
            "joint_histograms": [
                {
                    "pair": list(pair),
                    "edges": [[float(e) for e in ex], [float(e) for e in ey]],
                    "counts": [[int(c) for c in row] for row in counts],
                }
                for pair, (ex, ey, counts) in self.joint_histograms.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def summarize(samples: dict, params: ModelParams, config: LatticeConfig,
              edges: dict | None = None, joint_edges: dict | None = None) -> EmpiricalSummary:
    edges = edges or default_edges(params)
    joint_edges = default_joint_edges(params) if joint_edges is None else joint_edges
    n = len(samples["x_T"])
    hists, moments = {}, {}
    for name in FUNCTIONALS:
        vals = samples[name]
        hists[name] = {"edges": edges[name], "counts": _clipped_hist(vals, edges[name])}
        moments[name] = {"mean": float(np.mean(vals)), "var": float(np.var(vals))}
    moments["x_T"]["p_nonneg"] = float(np.mean(samples["x_T"] >= 0))
    joints = {}
    for (a, b), (ea, eb) in joint_edges.items():
        ia = np.clip(np.searchsorted(ea, samples[a], side="right") - 1, 0, len(ea) - 2)
        ib = np.clip(np.searchsorted(eb, samples[b], side="right") - 1, 0, len(eb) - 2)
        flat = np.bincount(ia * (len(eb) - 1) + ib, minlength=(len(ea) - 1) * (len(eb) - 1))
        joints[(a, b)] = (ea, eb, flat.reshape(len(ea) - 1, len(eb) - 1).astype(np.int64))
    return EmpiricalSummary(params, config, n, hists, moments, joints, samples)


def run_monte_carlo(params: ModelParams, config: LatticeConfig, backend=None, threads=None,
                    edges=None, joint_edges=None) -> EmpiricalSummary:
    """Simulate ``config.path_budget`` paths and aggregate them.

    Per-path results are stored by path index before any reduction, so the
    summary is identical for any thread count or backend.
    """
    counts = walk_counts(params, config, 0, config.path_budget, backend, threads)
    n_steps = config.steps(params.T)
    v_count, last_zero = counts[:, 4], counts[:, 3]
    if not (np.all(v_count >= 0) and np.all(v_count <= last_zero) and np.all(last_zero <= n_steps)):
        raise RuntimeError("per-path invariant 0 <= v <= tau <= T violated")
    samples = functionals_from_counts(counts, config)
    return summarize(samples, params, config, edges, joint_edges)


def paths_csv(samples: dict, first_index: int = 0) -> str:
    """One row per path: path_index, x_T, l_T, u, tau, v."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    n = len(samples["x_T"])
    cols = [samples[c] for c in CSV_COLUMNS[1:]]
    for i in range(n):
        w.writerow([first_index + i] + [repr(float(c[i])) for c in cols])
    return buf.getvalue()
