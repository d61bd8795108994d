"""Time the numba kernels against their pure-numpy twins.

    python benchmarks/bench_kernels.py            # full table
    python benchmarks/bench_kernels.py --quick    # smoke run

Both backends are importable side by side, so one process times both; the
``ENTDIST_BACKEND`` flag only changes which one the library calls by default.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from entdist import _kernels
from entdist.measure import max_entanglement
from entdist.roof import DensityMatrix, embedded_generators, random_isometry
from entdist.tensor import random_state


def best_of(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def hermitian(n: int, rng) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.ascontiguousarray(a + a.conj().T)


def roof_problem(dims, rank, rng):
    states = [random_state(dims, rng) for _ in range(rank)]
    rho = DensityMatrix.mixture(rng.dirichlet(np.ones(rank)), states)
    lam, vecs = rho.spectrum()
    amat = np.ascontiguousarray(vecs * np.sqrt(lam))
    v0 = np.ascontiguousarray(random_isometry(max(rank * rank, 4), rank, rng))
    return v0, amat, embedded_generators(dims), float(max_entanglement(dims))


def bench_jacobi(sizes, repeats, rng):
    rows = []
    for n in sizes:
        a = hermitian(n, rng)
        _kernels.jacobi_numba(a.copy(), 1e-12, 100)  # compile
        tn = best_of(lambda: _kernels.jacobi_numba(a.copy(), 1e-12, 100), repeats)
        tp = best_of(lambda: _kernels.jacobi_numpy(a.copy(), 1e-12, 100), repeats)
        rows.append((f"jacobi n={n}", tn, tp))
    return rows


def bench_descent(cases, iters, repeats, rng):
    rows = []
    for dims, rank in cases:
        v0, amat, gens, ctot = roof_problem(dims, rank, rng)
        _kernels.descend_numba(v0.copy(), amat, gens, ctot, 2, 0.0)  # compile
        run_n = lambda: _kernels.descend_numba(v0.copy(), amat, gens, ctot, iters, 0.0)
        run_p = lambda: _kernels.descend_numpy(v0.copy(), amat, gens, ctot, iters, 0.0)
        rows.append((f"descent dims={list(dims)} r={rank} ({iters} it)",
                     best_of(run_n, repeats), best_of(run_p, repeats)))
    return rows


def main(argv=None) -> list[tuple[str, float, float]]:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="tiny sizes, one repeat")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)

    if args.quick:
        repeats, sizes, iters = 1, [4, 8], 5
        cases = [((2, 2), 2)]
    else:
        repeats, sizes, iters = args.repeats, [8, 16, 32, 64], 200
        cases = [((2, 2), 2), ((2, 2), 4), ((2, 3), 3), ((2, 2, 2), 2)]

    rows = bench_jacobi(sizes, repeats, rng) + bench_descent(cases, iters, repeats, rng)
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba [ms]':>11}  {'numpy [ms]':>11}  {'speed-up':>8}")
    for name, tn, tp in rows:
        print(f"{name:<{width}}  {1e3 * tn:>11.3f}  {1e3 * tp:>11.3f}  {tp / tn:>7.1f}x")
    print(f"median speed-up: {statistics.median(tp / tn for _, tn, tp in rows):.1f}x "
          f"(default backend: {_kernels.BACKEND})")
    return rows


if __name__ == "__main__":
    main()
