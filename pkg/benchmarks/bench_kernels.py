"""Compiled kernel against the numpy fallback on the p_d basin renders.

    python benchmarks/bench_kernels.py [--size 300] [--repeat 3]
"""

import argparse
import time

import numpy as np

from secant_dyn import kernels
from secant_dyn.basin import Window, render_basin
from secant_dyn.polycore import Polynomial
from secant_dyn.secmap import BASIN_LIMITS


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    backends = ["numpy"] + (["cython"] if kernels.compiled is not None else [])
    w = Window(-3, 3, -3, 3, a.size, a.size)
    print(f"{a.size}x{a.size} on [-3,3]^2, max_iter={BASIN_LIMITS.max_iter}, workers={a.workers}")
    print(f"{'d':>2} " + " ".join(f"{b:>10}" for b in backends) + "   speedup  identical")
    for d in (2, 3, 4, 5):
        p = Polynomial.from_factored([(-2, 1), (0, 1), (1, d)])
        times, grids = [], []
        for b in backends:
            t, g = best_of(lambda: render_basin(p, w, BASIN_LIMITS, a.workers, b), a.repeat)
            times.append(t)
            grids.append(g)
        same = all(np.array_equal(grids[0].cells, g.cells) and np.array_equal(grids[0].iterations, g.iterations)
                   for g in grids[1:])
        speed = f"{times[0] / times[-1]:8.1f}x" if len(times) > 1 else "       -"
        print(f"{d:>2} " + " ".join(f"{t:9.3f}s" for t in times) + f"  {speed}  {same}")


if __name__ == "__main__":
    main()
