#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each hot kernel on representative desk-scale inputs under both
backends and prints timings plus the agreement check.  The numba timings
exclude JIT compilation (one warm-up call per kernel).

    python3 benchmarks/bench_kernels.py [--cube-bits 22] [--seed-bits 22]
"""

import argparse
import time

import numpy as np

from polyprg.kernels import _numba as nb
from polyprg.kernels import _numpy as knp


def bench(label, fn_nb, fn_np, check_equal=True):
    fn_nb()  # JIT warm-up
    t0 = time.perf_counter()
    r_nb = fn_nb()
    t_nb = time.perf_counter() - t0
    t0 = time.perf_counter()
    r_np = fn_np()
    t_np = time.perf_counter() - t0
    if check_equal:
        agree = np.array_equal(np.asarray(r_nb), np.asarray(r_np))
    else:
        agree = np.allclose(r_nb, r_np, rtol=1e-10)
    print(
        f"{label:34s} numba {t_nb:8.3f}s   numpy {t_np:8.3f}s   "
        f"speedup {t_np / max(t_nb, 1e-9):7.1f}x   agree={agree}"
    )


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cube-bits", type=int, default=22)
    ap.add_argument("--seed-bits", type=int, default=22)
    args = ap.parse_args()

    rng = np.random.default_rng(1)
    n_cube = args.cube_bits
    m = 4
    A = rng.integers(-3, 4, size=(m, n_cube)).astype(np.float64)
    th = rng.integers(-4, 5, size=(2, m)).astype(np.float64)
    b = rng.normal(size=m)

    print(f"cube enumeration: n={n_cube} ({1 << n_cube} points), m={m}")
    bench(
        "cube_orthant_counts (int)",
        lambda: nb.cube_orthant_counts(A, th, 0, 1 << n_cube),
        lambda: knp.cube_orthant_counts(A, th, 0, 1 << n_cube),
    )
    Af = A + rng.normal(scale=1e-3, size=A.shape)
    bench(
        "cube_orthant_counts (float)",
        lambda: nb.cube_orthant_counts(Af, th, 0, 1 << n_cube),
        lambda: knp.cube_orthant_counts(Af, th, 0, 1 << n_cube),
    )
    moll_bits = min(n_cube, 18)  # the numpy erfc path is slow; keep it sane
    bench(
        "cube_mollifier_sum (int)",
        lambda: nb.cube_mollifier_sum(A[:, :moll_bits], b, 0.8, 0, 1 << moll_bits),
        lambda: knp.cube_mollifier_sum(A[:, :moll_bits], b, 0.8, 0, 1 << moll_bits),
        check_equal=False,
    )

    n = 12
    rest = args.seed_bits
    As = rng.integers(-3, 4, size=(m, n)).astype(np.float64)
    ths = rng.integers(-4, 5, size=(1, m)).astype(np.float64)
    base = int(rng.integers(0, 1 << n))
    masks = rng.integers(0, 1 << n, size=rest).astype(np.int64)
    print(f"\nseed enumeration: n={n}, rest bits={rest} ({1 << rest} seeds), m={m}")
    bench(
        "linear_seed_orthant_counts",
        lambda: nb.linear_seed_orthant_counts(base, masks, As, ths, 0, 1 << rest),
        lambda: knp.linear_seed_orthant_counts(base, masks, As, ths, 0, 1 << rest),
    )
    defect_bits = min(rest, 18)
    bench(
        "linear_seed_max_defect",
        lambda: nb.linear_seed_max_defect(
            base, masks[:defect_bits], As, b, b - 0.5, b + 0.5, 0.8, 1.5, 0, 1 << defect_bits
        ),
        lambda: knp.linear_seed_max_defect(
            base, masks[:defect_bits], As, b, b - 0.5, b + 0.5, 0.8, 1.5, 0, 1 << defect_bits
        ),
        check_equal=False,
    )


if __name__ == "__main__":
    main()
