"""Time the numba and numpy kernel sets side by side.

    python benchmarks/bench_kernels.py [--sizes 65 129 257] [--repeat 5]

Both kernel modules are imported directly, so the SPARSE_SADDLE_BACKEND
setting does not matter here. Numba compile time is excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from sparse_saddle.linalg import _numba_kernels as nb
from sparse_saddle.linalg import _numpy_kernels as npk
from sparse_saddle.problems import build_global_parametrization, build_mixed_diffusion_1d
from sparse_saddle.saddle import assemble_at


def saddle_matrix(n):
    sys = build_mixed_diffusion_1d(n, build_global_parametrization(4, 2.0, 0.3, 1.0))
    return assemble_at(sys, np.zeros(4))


def spd_matrix(n, rng):
    X = rng.standard_normal((n, n))
    return X @ X.T + n * np.eye(n)


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n, rng):
    K = saddle_matrix(n)
    b = rng.standard_normal((K.shape[0], 8))
    S = spd_matrix(min(n, 96), rng)

    def lu(mod):
        return lambda: mod.lu_factor_inplace(K.copy())

    def lu_solve(mod):
        lu_ = K.copy()
        perm, _ = mod.lu_factor_inplace(lu_)
        return lambda: mod.lu_solve(lu_, perm, b)

    def chol(mod):
        return lambda: mod.cholesky(S)

    def jacobi(mod):
        return lambda: mod.jacobi_eigenvalues(S.copy(), 1e-12, 100)

    return {
        f"lu_factor  {K.shape[0]:4d}": lu,
        f"lu_solve   {K.shape[0]:4d}x8": lu_solve,
        f"cholesky   {S.shape[0]:4d}": chol,
        f"jacobi     {S.shape[0]:4d}": jacobi,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':22s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for n in args.sizes:
        for name, make in cases(n, rng).items():
            t_nb = best_of(make(nb), args.repeat)
            t_np = best_of(make(npk), args.repeat)
            print(f"{name:22s} {1e3 * t_nb:10.3f} {1e3 * t_np:10.3f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
