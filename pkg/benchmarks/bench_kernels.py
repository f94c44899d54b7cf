"""Benchmark the compiled kernels against the numpy reference backend.

Usage: python3 benchmarks/bench_kernels.py [--reps 2000]
"""
import argparse
import time

import numpy as np

from rssa import kernels
from rssa.kernels import _numpy_backend as numpy_backend

try:
    from rssa.kernels import _fast as fast_backend
except ImportError:
    fast_backend = None


def bench(fn, args_list, reps):
    # warm up, then time best-of-3 passes over the input set
    for args in args_list[:10]:
        fn(*args)
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for i in range(reps):
            fn(*args_list[i % len(args_list)])
        best = min(best, time.perf_counter() - t0)
    return best / reps


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=2000)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    lie_inputs = []
    lg_inputs = []
    for _ in range(64):
        samples = rng.uniform([0.5, 0.1, 0.05], [3.0, 1.0, 0.8], size=(27, 3))
        t2 = rng.uniform(-np.pi, np.pi)
        lie_inputs.append((samples, float(np.cos(t2)), float(np.sin(t2)),
                           float(rng.uniform(-3, 3)), float(rng.uniform(-3, 3)),
                           float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)),
                           0.01, float(rng.uniform(-1, 1))))
        lg_inputs.append((np.ascontiguousarray(rng.normal(size=(27, 2))),))

    backends = [("numpy", numpy_backend)]
    if fast_backend is not None:
        backends.append(("cython", fast_backend))
    print(f"active backend at import: {kernels.BACKEND}")
    print(f"{'kernel':<20} " + " ".join(f"{name:>12}" for name, _ in backends)
          + ("      speedup" if len(backends) == 2 else ""))
    for kernel in ("family_lie", "solve_g_star", "feasibility_bounds"):
        inputs = lie_inputs if kernel == "family_lie" else lg_inputs
        times = [bench(getattr(mod, kernel), inputs, args.reps)
                 for _, mod in backends]
        row = f"{kernel:<20} " + " ".join(f"{t * 1e6:>10.2f}us" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()
