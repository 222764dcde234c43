"""Benchmark the compiled episode kernel against the numpy fallback.

Runs the same seeded episodes through both kernels, verifies the
trajectories are bit-identical, and reports rounds/second plus speedup.

    python benchmarks/bench_kernels.py --horizon 20000 --repeats 3
"""
import argparse
import time

import numpy as np

from bcucb._kernel import HAVE_SPEEDUPS, build_plan, run_plan
from bcucb.presets import get_preset

CASES = [
    ("pmc-small", "bc-ucb", "exact"),
    ("pmc-small", "bc-ucb", "greedy"),
    ("pmc-extreme", "bc-ucb", "greedy"),
    ("pmc-extreme", "cucb", "greedy"),
    ("linear-small", "bc-ucb", "greedy"),
    ("lower-bound", "bc-ucb", "exact"),
]


def time_kernel(plan, horizon, seed, kernel, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        out = run_plan(plan, horizon, rng, kernel=kernel)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=20_000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    if not HAVE_SPEEDUPS:
        print("compiled kernel not available; nothing to compare")
        return 1

    print(f"{'case':38s} {'python':>10s} {'cython':>10s} "
          f"{'speedup':>8s}  identical")
    for preset, policy, oracle in CASES:
        inst = get_preset(preset).instance()
        plan = build_plan(inst, policy, oracle)
        t_py, out_py = time_kernel(plan, args.horizon, args.seed,
                                   "python", args.repeats)
        t_cy, out_cy = time_kernel(plan, args.horizon, args.seed,
                                   "cython", args.repeats)
        same = np.array_equal(out_py, out_cy)
        label = f"{preset}/{policy}/{oracle}"
        print(f"{label:38s} {args.horizon / t_py:>8.0f}/s "
              f"{args.horizon / t_cy:>8.0f}/s {t_py / t_cy:>7.1f}x  {same}")
        if not same:
            print("  MISMATCH: kernels disagree on this case")
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
