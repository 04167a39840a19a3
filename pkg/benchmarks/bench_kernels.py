#!/usr/bin/env python3
"""Benchmark the compiled cone-projection kernel against the pure lane.

The projection kernel dominates the runtime of brute-force verification
and of the engine's gap measurements, which is why it has a compiled
lane at all. This script times representative workloads on both lanes
and checks that they agree.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from homroi._kernels import BACKEND, pure

try:
    from homroi._kernels import conekern as compiled
except ImportError:
    compiled = None


def workloads(quick=False):
    rng = np.random.default_rng(0)
    scale = 0.2 if quick else 1.0
    for d, k, nv, label in [
        (3, 12, int(4000 * scale), "engine gap measurement (small cone)"),
        (3, 120, int(4000 * scale), "verification vs refined run"),
        (3, 2500, int(2000 * scale), "verification vs net construction"),
        (6, 40, int(2000 * scale), "higher-dimensional cone"),
    ]:
        G = rng.standard_normal((d, k))
        G[-1] = np.abs(G[-1])
        G /= np.linalg.norm(G, axis=0)
        V = rng.standard_normal((max(nv, 10), d))
        yield label, G, V


def bench(fn, G, V, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(G, V)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    print(f"active backend: {BACKEND}")
    if compiled is None:
        print("compiled lane unavailable; timing the pure lane only\n")
    header = f"{'workload':44s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s} {'agree':>9s}"
    print(header)
    print("-" * len(header))
    for label, G, V in workloads(args.quick):
        t_pure, d_pure = bench(pure.project_distances, G, V)
        if compiled is not None:
            t_comp, d_comp = bench(compiled.project_distances, G, V)
            agree = float(np.nanmax(np.abs(d_pure - d_comp)))
            print(f"{label:44s} {t_pure:9.3f}s {t_comp:9.3f}s "
                  f"{t_pure / t_comp:7.1f}x {agree:9.1e}")
            assert agree < 1e-9, "lane disagreement"
        else:
            print(f"{label:44s} {t_pure:9.3f}s {'-':>10s} {'-':>8s} {'-':>9s}")


if __name__ == "__main__":
    main()
