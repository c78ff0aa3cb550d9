"""Benchmark: numba kernel vs pure-numpy fallback for periodic convolution.

The direct-summation convolution dominates the runtime of every blur
experiment, so this is the one kernel worth accelerating. Run:

    python benchmarks/bench_convolution.py [--size 64] [--sigma 6] [--reps 20]
"""

import argparse
import time

import numpy as np

from deflact import _kernels
from deflact import gaussian_psf, psf_operator


def time_backend(op, img, backend, reps):
    # warm up (JIT compile for numba, cache touch for numpy)
    _kernels.conv2d_periodic(img, op._fwd_rows, op._fwd_cols, op.weights,
                             backend=backend)
    start = time.perf_counter()
    for _ in range(reps):
        out = _kernels.conv2d_periodic(img, op._fwd_rows, op._fwd_cols,
                                       op.weights, backend=backend)
    elapsed = (time.perf_counter() - start) / reps
    return elapsed, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=64)
    parser.add_argument("--sigma", type=float, default=6.0)
    parser.add_argument("--reps", type=int, default=20)
    args = parser.parse_args()

    n = args.size
    op = psf_operator(gaussian_psf(n, n, args.sigma), n, n)
    img = np.random.default_rng(0).standard_normal((n, n))
    flops = 2 * op.weights.size * n * n

    print(f"periodic convolution, image {n}x{n}, "
          f"{op.weights.size} kernel entries, {args.reps} reps")
    results = {}
    for backend in _kernels.available_backends():
        elapsed, out = time_backend(op, img, backend, args.reps)
        results[backend] = (elapsed, out)
        print(f"  {backend:>6}: {elapsed * 1e3:8.2f} ms/apply "
              f"({flops / elapsed / 1e9:5.2f} Gflop/s)")

    if len(results) == 2:
        t_numba = results["numba"][0]
        t_numpy = results["numpy"][0]
        gap = np.abs(results["numba"][1] - results["numpy"][1]).max()
        print(f"  speedup numba vs numpy: {t_numpy / t_numba:.2f}x, "
              f"max |difference| = {gap:.3e}")


if __name__ == "__main__":
    main()
