"""Throughput comparison of the compiled and pure-Python sweep kernels.

Usage: python benchmarks/bench_sweep.py [n] [p] [sweeps]
"""

import sys
import time

import numpy as np

from bayes_screen.data import Precomputed, PriorConfig, FixedC, Dataset
from bayes_screen.gibbs import default_initial_state
from bayes_screen.kernel import HAS_COMPILED, get_sweep_kernel


def bench(kernel, d, pre, prior, sweeps, seed=0):
    rng = np.random.default_rng(seed)
    state = default_initial_state(d, prior, rng)
    start = time.perf_counter()
    for _ in range(sweeps):
        uniforms = rng.random(d.p)
        normals = rng.standard_normal(d.p)
        kernel(d.x, pre.col_sq_norms, state.beta, state.gamma_mask,
               state.residual, state.sigma_sq, state.c, state.t_n,
               uniforms, normals)
    return time.perf_counter() - start


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    p = int(sys.argv[2]) if len(sys.argv) > 2 else 1000
    sweeps = int(sys.argv[3]) if len(sys.argv) > 3 else 200

    rng = np.random.default_rng(1)
    x = rng.standard_normal((n, p))
    y = x[:, :5] @ np.full(5, 2.0) + rng.standard_normal(n)
    d = Dataset.from_arrays(y, x)
    pre = Precomputed.from_dataset(d)
    prior = PriorConfig(m_n=n // 2, c_prior=FixedC(float(n)))

    print(f"n={n} p={p} sweeps={sweeps}")
    t_py = bench(get_sweep_kernel("python"), d, pre, prior, sweeps)
    print(f"python : {sweeps / t_py:10.1f} sweeps/s  ({t_py:.3f}s)")
    if HAS_COMPILED:
        t_cy = bench(get_sweep_kernel("cython"), d, pre, prior, sweeps)
        print(f"cython : {sweeps / t_cy:10.1f} sweeps/s  ({t_cy:.3f}s)")
        print(f"speedup: {t_py / t_cy:.1f}x")
    else:
        print("compiled kernel not available")


if __name__ == "__main__":
    main()
