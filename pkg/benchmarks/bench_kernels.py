"""Time the numba kernels against their numpy twins.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numba timings exclude compilation (one warm-up call per kernel).
"""

import argparse
import time

import numpy as np

from paretoflow import kernels
from paretoflow._accel import HAVE_NUMBA, set_backend


def _best(fn, repeat):
    fn()  # warm-up / compile
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases(rng):
    F = rng.random((2000, 3))
    X, Y = rng.random((2000, 3)), rng.random((500, 3))
    a, b = rng.integers(0, 26, 200), rng.integers(0, 26, 200)
    P2 = rng.random((2000, 2))
    P3 = rng.random((300, 3))
    return {
        "dominance_layers n=2000 d=3": lambda: kernels.dominance_layers(F),
        "min_sq_dist 2000x500 d=3": lambda: kernels.min_sq_dist(X, Y, True),
        "edit_distance 200x200": lambda: kernels.edit_distance(a, b),
        "hypervolume_2d n=2000": lambda: kernels.hypervolume_2d(P2, np.zeros(2)),
        "hypervolume_3d n=300": lambda: kernels.hypervolume_3d(P3, np.zeros(3)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    results = {}
    for b in backends:
        prev = set_backend(b)
        for name, fn in cases(np.random.default_rng(args.seed)).items():
            results.setdefault(name, {})[b] = _best(fn, args.repeat)
        set_backend(prev)
    print(f"{'kernel':<30} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for name, r in results.items():
        nb = r.get("numba", float("nan"))
        print(f"{name:<30} {1e3 * r['numpy']:12.3f} {1e3 * nb:12.3f} {r['numpy'] / nb:8.1f}")


if __name__ == "__main__":
    main()
