"""Compiled vs numpy walk kernel: throughput and bit-for-bit agreement.

    python benchmarks/bench_walk.py [--paths N] [--delta D] [--repeat R]
"""

import argparse
import json
import platform
import time

import numpy as np

from dryskew import simulate
from dryskew.params import ModelParams
from dryskew.simulate import LatticeConfig


def time_kernel(params, cfg, backend, repeat):
    best, counts = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        counts = simulate.walk_counts(params, cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, counts


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=2000)
    ap.add_argument("--delta", type=float, default=0.005)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true", help="print a JSON record instead of a table")
    args = ap.parse_args()

    params = ModelParams.dry_friction(0.7, 0.5, 1.0)
    cfg = LatticeConfig(delta=args.delta, path_budget=args.paths)
    steps = args.paths * cfg.steps(params.T)
    rows, ref = [], None
    for backend in simulate.available_backends():
        sec, counts = time_kernel(params, cfg, backend, args.repeat)
        if ref is None:
            ref = counts
        rows.append({"backend": backend, "seconds": sec, "ns_per_step": 1e9 * sec / steps,
                     "identical": bool(np.array_equal(ref, counts))})
    base = next(r["seconds"] for r in rows if r["backend"] == "numpy")
    for r in rows:
        r["speedup_vs_numpy"] = base / r["seconds"]

    if args.json:
        print(json.dumps({"paths": args.paths, "delta": args.delta, "steps": steps,
                          "python": platform.python_version(), "results": rows}, indent=2))
        return
    print(f"{args.paths} paths x {cfg.steps(params.T)} steps (delta={args.delta}), best of {args.repeat}")
    print(f"{'backend':<10}{'seconds':>10}{'ns/step':>10}{'speedup':>10}  identical")
    for r in rows:
        print(f"{r['backend']:<10}{r['seconds']:>10.3f}{r['ns_per_step']:>10.2f}"
              f"{r['speedup_vs_numpy']:>10.1f}  {r['identical']}")


if __name__ == "__main__":
    main()
