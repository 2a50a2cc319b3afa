"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N]

The first jit call (compilation or cache load) is excluded from the timings.
"""
import argparse
import timeit

import numpy as np

from kmpath import _kernels
from kmpath.fokker_planck import PdeGrid, fp_operator, grid_delta, positivity_substeps, step_schedule
from kmpath.model import double_well


def cases():
    rng = np.random.default_rng(0)
    m = double_well()
    x0 = rng.uniform(-3, 3, 200)
    noise = rng.standard_normal((200, 1000))
    yield ("em_paths 200x1000",
           lambda f: f(m.drift, m.diff2, x0, noise, 1e-3, 1e6, False),
           _kernels.em_paths_jit, _kernels.em_paths_np)

    x = rng.normal(size=1_000_000)
    dx = rng.normal(size=1_000_000) * 0.03
    yield ("bin_sums 1e6 pairs",
           lambda f: f(x, dx, -3.0, 3.0, 50),
           _kernels.bin_sums_jit, _kernels.bin_sums_np)

    g = PdeGrid(-6, 6, 401, 1.0)
    lo, di, up, _ = fp_operator(m, g)
    w = g.weights()
    sub = positivity_substeps(di, w, g.dt)
    sched = step_schedule(g.n_t * sub)
    p0 = grid_delta(g, -2.0)
    yield (f"march n_x=401, {g.n_t * sub} steps",
           lambda f: f(lo, di, up, w, sched, g.dt / sub, p0, sub),
           _kernels.march_jit, _kernels.march_np)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':34s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for name, call, fj, fn in cases():
        call(fj)  # compile / load cache
        tj = min(timeit.repeat(lambda: call(fj), number=1, repeat=args.repeat))
        tn = min(timeit.repeat(lambda: call(fn), number=1, repeat=args.repeat))
        print(f"{name:34s} {tj * 1e3:11.2f} {tn * 1e3:11.2f} {tn / tj:8.1f}")


if __name__ == "__main__":
    main()
