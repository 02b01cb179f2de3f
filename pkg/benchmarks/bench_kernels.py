"""Timing comparison of the numba and numpy Monte Carlo kernel backends.

Usage: python benchmarks/bench_kernels.py [--batch 2000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from lsfp.kernels import _BACKENDS, get_backend


def _inputs(rng, B, L, K, M):
    z = rng.standard_normal((B, L, K, M)) + 1j * rng.standard_normal((B, L, K, M))
    g = rng.standard_normal((B, L, K, L, M)) + 1j * rng.standard_normal(
        (B, L, K, L, M)
    )
    a = rng.standard_normal((L, K, L)) + 1j * rng.standard_normal((L, K, L))
    return z, g, a


def bench_backend(name, z, g, a, repeats):
    kern = get_backend(name)
    B, L, K, M = z.shape
    psi = np.zeros((L, K, M, M), dtype=complex)
    b = np.zeros((L, K, L), dtype=complex)
    c = np.zeros((L, K, K, L, L), dtype=complex)
    h = np.zeros((L, K), dtype=complex)
    p2 = np.zeros((L, K, L, K))

    def one_pass():
        ip2 = kern.inner_products(z, g)
        kern.accumulate_psi(z, psi)
        kern.accumulate_moments(ip2, b, c)
        w = kern.apply_weights(ip2, a)
        kern.accumulate_sinr_terms(w, h, p2)

    one_pass()  # warm-up (jit compilation for numba)
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        one_pass()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    shapes = [(2, 2, 4), (2, 2, 8), (4, 6, 16)]
    print(f"{'L':>3} {'K':>3} {'M':>4} {'batch':>7}  " +
          "  ".join(f"{n:>10}" for n in sorted(_BACKENDS)))
    for L, K, M in shapes:
        z, g, a = _inputs(rng, args.batch, L, K, M)
        row = []
        for name in sorted(_BACKENDS):
            row.append(bench_backend(name, z, g, a, args.repeats))
        cells = "  ".join(f"{t * 1e3:8.1f}ms" for t in row)
        print(f"{L:>3} {K:>3} {M:>4} {args.batch:>7}  {cells}")


if __name__ == "__main__":
    main()
