"""Command-line interface: ``dryskew <command> [flags]``.

Commands tabulate densities (density, occupation, joint, table), run the
lattice simulation (simulate) or the validation battery (validate). Every
command writes a deterministic payload; wall-clock provenance goes to a
``<out>.meta.json`` sidecar.

Settings come from, in increasing priority: built-in defaults, a TOML file
(``--config`` or the ``DRYSKEW_CONFIG`` environment variable), then flags.

Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

try:
    import tomllib as _toml
except ImportError:  # Python < 3.11
    import tomli as _toml

from . import analytic, normalization, simulate, special, validate
from .errors import ConfigurationError, ConvergenceError, DomainError
from .output import FORMATS, DensityGrid, atomic_write, table_csv, write_sidecar
from .params import ModelParams
from .quadrature import Dim, QuadratureSpec, integrate_nested

ENV_CONFIG = "DRYSKEW_CONFIG"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

PDF2_NOTICE = {
    "corrected": "occupation joint uses the corrected form (x-integral of the (U, X_T, L_T) joint)",
    "verbatim": "occupation joint uses the printed form, which does not integrate to 1",
}

# (section, key) -> default; flags and TOML keys share these names
DEFAULTS = {
    ("model", "p"): 0.5,
    ("model", "m"): 0.0,
    ("model", "m1"): None,
    ("model", "m2"): None,
    ("model", "T"): 1.0,
    ("lattice", "delta"): 0.005,
    ("lattice", "epsilon_factor"): 2,
    ("lattice", "seed"): 20240607,
    ("lattice", "paths"): None,
    ("lattice", "threads"): 1,
    ("lattice", "backend"): None,
    ("quadrature", "abs_tol"): 1e-10,
    ("quadrature", "rel_tol"): 1e-8,
    ("quadrature", "max_subdivisions"): 200,
    ("output", "format"): "csv",
    ("output", "out"): None,
    ("run", "pdf2"): "corrected",
    ("run", "profile"): "ci",
    ("run", "tol"): None,
}

FLAG_KEYS = {
    "p": ("model", "p"), "m": ("model", "m"), "m1": ("model", "m1"), "m2": ("model", "m2"),
    "T": ("model", "T"), "delta": ("lattice", "delta"), "K": ("lattice", "epsilon_factor"),
    "seed": ("lattice", "seed"), "paths": ("lattice", "paths"), "threads": ("lattice", "threads"),
    "backend": ("lattice", "backend"), "format": ("output", "format"), "out": ("output", "out"),
    "pdf2": ("run", "pdf2"), "profile": ("run", "profile"), "tol": ("run", "tol"),
}

JOINTS = {
    "tau_v_x_l": ("t", "v", "x", "l"),
    "tau_x_l": ("t", "x", "l"),
    "x_l": ("x", "l"),
    "tau_u_x_l": ("t", "u", "x", "l"),
    "u_x_l": ("u", "x", "l"),
    "u_l": ("u", "l"),
}

# integrating these free variables out of a joint leaves this lower law
MARGINALS = {
    ("tau_v_x_l", ("v",)): ("tau_x_l", ("t", "x", "l")),
    ("tau_v_x_l", ("t", "v")): ("x_l", ("x", "l")),
    ("tau_x_l", ("t",)): ("x_l", ("x", "l")),
    ("x_l", ("l",)): ("marginal", ("x",)),
    ("x_l", ("x",)): ("local_time", ("l",)),
    ("tau_u_x_l", ("t",)): ("u_x_l", ("u", "x", "l")),
    ("u_x_l", ("x",)): ("u_l", ("u", "l")),
    ("u_l", ("l",)): ("occupation", ("u",)),
    ("u_l", ("u",)): ("local_time", ("l",)),
}


# -- configuration ---------------------------------------------------------------


class Settings:
    """Resolved settings with the source of each value (flag, file or default)."""

    def __init__(self, args, file_data: dict, file_path: str | None):
        self.values, self.sources = {}, {}
        self.file_path = file_path
        known = {s for s, _ in DEFAULTS}
        for section, table in file_data.items():
            if section not in known or not isinstance(table, dict):
                raise ConfigurationError(f"unknown config section [{section}]")
            for key in table:
                if (section, key) not in DEFAULTS:
                    raise ConfigurationError(f"unknown config key {section}.{key}")
        for sk, default in DEFAULTS.items():
            self.values[sk], self.sources[sk] = default, "default"
            if sk[1] in file_data.get(sk[0], {}):
                self.values[sk], self.sources[sk] = file_data[sk[0]][sk[1]], "file"
        for flag, sk in FLAG_KEYS.items():
            v = getattr(args, flag, None)
            if v is not None:
                self.values[sk], self.sources[sk] = v, "flag"

    def __getitem__(self, key):
        return self.values[key]

    def provenance(self, keys) -> dict:
        """Resolved values and their sources, for the payload metadata."""
        out = {}
        for sk in keys:
            v = self.values[sk]
            if v is not None:
                out[f"{sk[0]}.{sk[1]}"] = {"value": v, "source": self.sources[sk]}
        return out


def load_config_file(path: str | None) -> tuple[dict, str | None]:
    path = path or os.environ.get(ENV_CONFIG) or None
    if not path:
        return {}, None
    try:
        with open(path, "rb") as fh:
            return _toml.load(fh), path
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except _toml.TOMLDecodeError as e:
        raise ConfigurationError(f"config file {path}: {e}") from None


def model_params(s: Settings) -> ModelParams:
    p, T = float(s["model", "p"]), float(s["model", "T"])
    m1, m2 = s["model", "m1"], s["model", "m2"]
    if m1 is None and m2 is None:
        return ModelParams.dry_friction(p, float(s["model", "m"]), T)
    if m1 is None or m2 is None:
        raise ConfigurationError("give both m1 and m2 for a general drift")
    if s.sources["model", "m"] != "default":
        raise ConfigurationError("m cannot be combined with m1/m2")
    return ModelParams(p, float(m1), float(m2), T)


def lattice_config(s: Settings, default_paths: int) -> simulate.LatticeConfig:
    paths = s["lattice", "paths"]
    return simulate.LatticeConfig(
        delta=float(s["lattice", "delta"]), epsilon_factor=int(s["lattice", "epsilon_factor"]),
        seed=int(s["lattice", "seed"]),
        path_budget=int(paths if paths is not None else default_paths),
        threads=int(s["lattice", "threads"]),
    )


def quadrature_spec(s: Settings) -> QuadratureSpec:
    tol = s["run", "tol"]
    abs_tol = float(tol if tol is not None else s["quadrature", "abs_tol"])
    rel_tol = float(tol if tol is not None else s["quadrature", "rel_tol"])
    return QuadratureSpec(abs_tol=abs_tol, rel_tol=rel_tol,
                          max_subdivisions=int(s["quadrature", "max_subdivisions"]))


def parse_grid(text: str) -> tuple[str, np.ndarray]:
    """``NAME=MIN:MAX:COUNT`` -> (name, linspace)."""
    name, sep, rng = text.partition("=")
    parts = rng.split(":")
    if not sep or len(parts) != 3 or not name:
        raise ConfigurationError(f"grid must look like NAME=MIN:MAX:COUNT, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigurationError(f"bad numbers in grid {text!r}") from None
    if n < 2 or not lo < hi:
        raise ConfigurationError(f"grid {name}: need MIN < MAX and COUNT >= 2")
    return name.strip(), np.linspace(lo, hi, n)


def parse_fix(text: str) -> tuple[str, float]:
    name, sep, val = text.partition("=")
    try:
        return name.strip(), float(val)
    except ValueError:
        raise ConfigurationError(f"--fix must look like NAME=VALUE, got {text!r}") from None


def _grids(args, defaults: list) -> list:
    if args.grid:
        return [parse_grid(g) for g in args.grid]
    return [parse_grid(g) for g in defaults]


# -- output ---------------------------------------------------------------------


def emit(payload: str, s: Settings, command: str, argv):
    out = s["output", "out"]
    if out is None:
        sys.stdout.write(payload)
        return
    atomic_write(out, payload)
    write_sidecar(out, {"command": command, "argv": list(argv), "config_file": s.file_path})


def render_grid(grid: DensityGrid, s: Settings) -> str:
    return grid.to_csv() if s["output", "format"] == "csv" else grid.to_json()


def _common_meta(params: ModelParams, s: Settings, keys) -> dict:
    meta = {"config": s.provenance(keys)}
    if params.untested_regime:
        meta["untested_regime"] = True
    return meta


MODEL_KEYS = [("model", "p"), ("model", "m"), ("model", "m1"), ("model", "m2"), ("model", "T")]
QUAD_KEYS = [("quadrature", "abs_tol"), ("quadrature", "rel_tol"), ("run", "tol")]


# -- commands -------------------------------------------------------------------


def cmd_density(args, s: Settings):
    params = model_params(s)
    params.require_dry_friction()
    T, m = params.T, abs(params.m)
    span = 5.0 * math.sqrt(T) + 2.0 * m * T
    ((name, x),) = _grids(args, [f"x={-span}:{span}:201"])
    if name != "x":
        raise ConfigurationError("density takes a single grid named x")
    mass, err = normalization.marginal_mass(params)
    grid = DensityGrid(
        [("x", x)], analytic.marginal_density(x, params), params, mass,
        extra={"cdf": analytic.marginal_cdf(x, params)},
        metadata={**_common_meta(params, s, MODEL_KEYS), "normalization_error": err,
                  "law": "X_T"},
    )
    return render_grid(grid, s)


def cmd_occupation(args, s: Settings):
    params = model_params(s)
    params.require_dry_friction()
    T = params.T
    form = s["run", "pdf2"]
    ((name, u),) = _grids(args, [f"u={0.01 * T}:{0.99 * T}:99"])
    if name != "u":
        raise ConfigurationError("occupation takes a single grid named u")
    if not (u[0] > 0 and u[-1] < T):
        raise ConfigurationError("the u grid must lie strictly inside (0, T)")
    spec = quadrature_spec(s)
    dens = analytic.occupation_density(u, params, form, spec)
    mass, err = normalization.occupation_mass(params, form)
    grid = DensityGrid(
        [("u", u)], dens, params, mass,
        metadata={**_common_meta(params, s, MODEL_KEYS + QUAD_KEYS + [("run", "pdf2")]),
                  "normalization_error": err, "pdf2_form": form, "notice": PDF2_NOTICE[form],
                  "law": "U"},
    )
    return render_grid(grid, s)


def _joint_eval(which, params, form, weight):
    if which == "tau_v_x_l":
        return lambda t, v, x, l: analytic.joint_tau_v_x_l(t, v, x, l, params, weight)
    if which == "tau_x_l":
        return lambda t, x, l: analytic.joint_tau_x_l(t, x, l, params)
    if which == "x_l":
        return lambda x, l: analytic.joint_x_l(x, l, params)
    if which == "tau_u_x_l":
        return lambda t, u, x, l: analytic.joint_tau_u_x_l(t, u, x, l, params)
    if which == "u_x_l":
        return lambda u, x, l: analytic.joint_u_x_l(u, x, l, params)
    return lambda u, l: analytic.joint_u_l(u, l, params, form)


def _dim(var, T, fixed_t=None):
    if var in ("x", "l"):
        return Dim(0.0, math.inf, scale=math.sqrt(T))
    if var == "v":
        if fixed_t is not None:
            return Dim(0.0, fixed_t, endpoint="sqrt")
        return Dim(0.0, lambda *outer: outer[0], endpoint="sqrt")
    return Dim(0.0, T, endpoint="sqrt")


def slice_mass(which, free, fixed, params, form="corrected", weight="printed"):
    """Integral of the selected joint over the full range of its ``free`` variables."""
    names = JOINTS[which]
    f = _joint_eval(which, params, form, weight)
    T = params.T
    order = sorted(free, key=lambda v: "tuvxl".index(v))
    spec = QuadratureSpec(1e-11, 1e-9, 500, tail_strategy="exp")
    signs = [(1.0,)] if "x" not in order else [(1.0,), (-1.0,)]
    total = 0.0
    for (sx,) in signs:
        def g(*vals):
            env = dict(fixed)
            env.update(zip(order, vals))
            if "x" in order:
                env["x"] = sx * env["x"]
            if "v" in env and env["v"] > env["t"]:
                return 0.0
            return float(f(*[env[n] for n in names]))
        dims = [_dim(v, T, fixed.get("t")) for v in order]
        val, _ = integrate_nested(g, dims, spec)
        total += val
    return total


def _reference(which, free, fixed, params):
    key = (which, tuple(sorted(free, key=lambda v: "tuvxl".index(v))))
    if len(free) == len(JOINTS[which]):
        return 1.0
    if key not in MARGINALS:
        return None
    law, names = MARGINALS[key]
    args = [fixed[n] for n in names]
    fns = {
        "tau_x_l": lambda t, x, l: analytic.joint_tau_x_l(t, x, l, params),
        "x_l": lambda x, l: analytic.joint_x_l(x, l, params),
        "marginal": lambda x: analytic.marginal_density(x, params),
        "local_time": lambda l: analytic.local_time_density(l, params),
        "u_x_l": lambda u, x, l: analytic.joint_u_x_l(u, x, l, params),
        "u_l": lambda u, l: analytic.joint_u_l(u, l, params),
        "occupation": lambda u: analytic.occupation_density(u, params),
    }
    return float(fns[law](*args))


def cmd_joint(args, s: Settings):
    params = model_params(s)
    which = args.which
    names = JOINTS[which]
    weight = args.weight
    if which != "tau_v_x_l":
        params.require_dry_friction()
    elif weight not in analytic.WEIGHTS:
        raise ConfigurationError(f"--weight must be one of {analytic.WEIGHTS}")
    T = params.T
    sT = math.sqrt(T)
    default_grids = {
        "x_l": [f"x={-4 * sT}:{4 * sT}:81", f"l=0:{4 * sT}:41"],
        "u_l": [f"u={0.01 * T}:{0.99 * T}:50", f"l=0:{4 * sT}:41"],
    }
    if not args.grid and which not in default_grids:
        raise ConfigurationError(f"joint {which} needs --grid for one or two of {names}")
    grids = _grids(args, default_grids.get(which, []))
    fixed = dict(parse_fix(f) for f in (args.fix or []))
    free = [n for n, _ in grids]
    if not 1 <= len(grids) <= 2:
        raise ConfigurationError("tabulate one or two axes; fix the others with --fix")
    for n in free + list(fixed):
        if n not in names:
            raise ConfigurationError(f"{which} has variables {names}, not {n!r}")
    if set(free) & set(fixed) or set(free) | set(fixed) != set(names):
        raise ConfigurationError(f"every variable of {which} must be gridded or fixed exactly once")
    form = s["run", "pdf2"]
    f = _joint_eval(which, params, form, weight)
    mesh = np.meshgrid(*[g for _, g in grids], indexing="ij")
    env = {n: np.full(mesh[0].shape, v) for n, v in fixed.items()}
    env.update({n: m for (n, _), m in zip(grids, mesh)})
    if "v" in env and "t" in env:
        inside = env["v"] <= env["t"]
        env["v"] = np.where(inside, env["v"], env["t"])
    else:
        inside = True
    vals = np.where(inside, f(*[env[n] for n in names]), 0.0)

    mass = slice_mass(which, free, fixed, params, form, weight)
    meta = {**_common_meta(params, s, MODEL_KEYS + [("run", "pdf2")]), "joint": which,
            "fixed": fixed}
    ref = _reference(which, free, fixed, params)
    if ref is not None:
        meta["reference_value"] = ref
        meta["reference_note"] = "value the free-axis integral should reproduce"
    if which == "u_l" or which == "u_x_l":
        meta["pdf2_form"] = form
        meta["notice"] = PDF2_NOTICE[form]
    if which == "tau_v_x_l":
        meta["drift_weight"] = weight
    grid = DensityGrid(list(grids), vals, params, mass, metadata=meta)
    return render_grid(grid, s)


TABLE_FUNCTIONS = {
    "marginal_density": (("x",), lambda P: lambda x: analytic.marginal_density(x, P)),
    "marginal_cdf": (("x",), lambda P: lambda x: analytic.marginal_cdf(x, P)),
    "local_time_density": (("l",), lambda P: lambda l: analytic.local_time_density(l, P)),
    "local_time_cdf": (("l",), lambda P: lambda l: analytic.local_time_cdf(l, P)),
    "occupation_density": (("u",), lambda P: lambda u: analytic.occupation_density(u, P)),
    "occupation_cdf": (("u",), lambda P: analytic.OccupationLaw(P).cdf),
    "first_passage_density": (("s", "y"), lambda P: special.first_passage_density),
    "gaussian_pdf": (("s", "x"), lambda P: special.gaussian_pdf),
    "f_aux": (("y", "l", "c"), lambda P: lambda y, l, c: analytic.f_aux(y, l, c, P.m)),
}


def cmd_table(args, s: Settings):
    if args.fn not in TABLE_FUNCTIONS:
        raise ConfigurationError(f"--fn must be one of {sorted(TABLE_FUNCTIONS)}")
    names, make = TABLE_FUNCTIONS[args.fn]
    params = model_params(s)
    if args.fn not in ("first_passage_density", "gaussian_pdf"):
        params.require_dry_friction()
    if not args.grid:
        raise ConfigurationError(f"{args.fn} needs --grid for its variables {names}")
    grids = [parse_grid(g) for g in args.grid]
    fixed = dict(parse_fix(f) for f in (args.fix or []))
    free = [n for n, _ in grids]
    if len(grids) > 2 or set(free) | set(fixed) != set(names) or set(free) & set(fixed):
        raise ConfigurationError(f"{args.fn}: grid one or two of {names} and fix the rest")
    mesh = np.meshgrid(*[g for _, g in grids], indexing="ij")
    env = {n: np.full(mesh[0].shape, v) for n, v in fixed.items()}
    env.update({n: m for (n, _), m in zip(grids, mesh)})
    vals = np.asarray(make(params)(*[env[n] for n in names]), dtype=float).reshape(mesh[0].shape)
    meta = {**_common_meta(params, s, MODEL_KEYS), "function": args.fn, "fixed": fixed}
    kind = "density" if args.fn.endswith(("density", "pdf")) else "value"
    grid = DensityGrid(list(grids), vals, params, None, value_name=kind, metadata=meta)
    return render_grid(grid, s)


LATTICE_KEYS = [("lattice", "delta"), ("lattice", "epsilon_factor"), ("lattice", "seed"),
                ("lattice", "paths")]


def cmd_simulate(args, s: Settings):
    params = model_params(s)
    params.require_dry_friction()
    config = lattice_config(s, default_paths=100_000)
    summary = simulate.run_monte_carlo(params, config, backend=s["lattice", "backend"])
    if args.csv_paths:
        atomic_write(args.csv_paths, simulate.paths_csv(summary.samples))
    d = summary.to_dict()
    d["config"] = s.provenance(MODEL_KEYS + LATTICE_KEYS)
    if params.untested_regime:
        d["untested_regime"] = True
    if s["output", "format"] == "json":
        return json.dumps(d, indent=2, sort_keys=True) + "\n"
    rows = []
    for name, h in d["histograms"].items():
        e, c = h["edges"], h["counts"]
        rows += [(name, float(e[i]), float(e[i + 1]), int(c[i])) for i in range(len(c))]
    meta = {k: d[k] for k in ("params", "lattice", "n_paths", "steps", "moments", "config")}
    return table_csv(meta, ("functional", "bin_lo", "bin_hi", "count"), rows)


def cmd_validate(args, s: Settings):
    params = model_params(s)
    params.require_dry_friction()
    profile = s["run", "profile"]
    config = lattice_config(s, default_paths=100_000 if profile == "ci" else 1_000_000)
    tol = s["run", "tol"]
    report = validate.run_full_validation(params, config, profile, s["run", "pdf2"],
                                          None if tol is None else float(tol))
    sys.stderr.write(report.table() + "\n")
    if s["output", "format"] == "json":
        payload = report.to_json() + "\n"
    else:
        rows = [(c.name, c.kind, c.observed, c.threshold, c.comparison,
                 "" if c.target is None else c.target, "PASS" if c.passed else "FAIL")
                for c in report.checks]
        meta = {"params": report.params.to_dict(), **report.config, "pass": report.passed}
        payload = table_csv(meta, ("name", "kind", "observed", "threshold", "comparison",
                                   "target", "result"), rows)
    return payload, (EXIT_OK if report.passed else EXIT_FAIL)


COMMANDS = {
    "density": cmd_density,
    "occupation": cmd_occupation,
    "joint": cmd_joint,
    "table": cmd_table,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--p", type=float, help="skewness p in (0, 1)")
    g.add_argument("--m", type=float, help="dry-friction drift level m")
    g.add_argument("--m1", type=float, help="drift on [0, inf) (joint tau_v_x_l only)")
    g.add_argument("--m2", type=float, help="drift on (-inf, 0) (joint tau_v_x_l only)")
    g.add_argument("--T", type=float, help="time horizon")
    g = common.add_argument_group("lattice")
    g.add_argument("--delta", type=float, help="lattice space step")
    g.add_argument("--K", type=int, help="local-time window half-width in lattice steps")
    g.add_argument("--paths", type=int, help="number of simulated paths")
    g.add_argument("--seed", type=int, help="64-bit RNG seed")
    g.add_argument("--threads", type=int, help="worker threads for the compiled walk")
    g.add_argument("--backend", choices=simulate.BACKENDS, help="walk kernel")
    g = common.add_argument_group("run")
    g.add_argument("--grid", action="append", metavar="NAME=MIN:MAX:COUNT")
    g.add_argument("--fix", action="append", metavar="NAME=VALUE")
    g.add_argument("--tol", type=float, help="quadrature tolerance (validate: every check tolerance)")
    g.add_argument("--pdf2", choices=analytic.PDF2_FORMS, help="occupation joint form")
    g.add_argument("--profile", choices=validate.PROFILES)
    g.add_argument("--format", choices=FORMATS)
    g.add_argument("--out", help="output file (default: stdout)")
    g.add_argument("--config", help=f"TOML config file (default: ${ENV_CONFIG})")

    parser = argparse.ArgumentParser(prog="dryskew", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("density", parents=[common], help="marginal density and CDF of X_T")
    sub.add_parser("occupation", parents=[common], help="occupation-time density")
    j = sub.add_parser("joint", parents=[common], help="slice of a joint density")
    j.add_argument("which", choices=sorted(JOINTS))
    j.add_argument("--weight", default="printed", help="drift weight for tau_v_x_l")
    t = sub.add_parser("table", parents=[common], help="tabulate a named function")
    t.add_argument("--fn", required=True, help="one of " + ", ".join(sorted(TABLE_FUNCTIONS)))
    sm = sub.add_parser("simulate", parents=[common], help="run the lattice Monte Carlo")
    sm.add_argument("--csv-paths", help="also write one CSV row per path here")
    sub.add_parser("validate", parents=[common], help="run the validation battery")
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_data, path = load_config_file(args.config)
        s = Settings(args, file_data, path)
        if s["output", "format"] not in FORMATS:
            raise ConfigurationError(f"format must be one of {FORMATS}")
        result = COMMANDS[args.command](args, s)
        payload, code = result if isinstance(result, tuple) else (result, EXIT_OK)
        emit(payload, s, args.command, argv)
        return code
    except (ConfigurationError, DomainError) as e:
        sys.stderr.write(f"dryskew: configuration error: {e}\n")
        return EXIT_CONFIG
    except ConvergenceError as e:
        sys.stderr.write(f"dryskew: numerical failure: {e}\n")
        return EXIT_FAIL
    except OSError as e:
        sys.stderr.write(f"dryskew: I/O error: {e}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
