"""Benchmark the compiled SMO backend against the numpy fallback.

Times both implementations on identical synthetic binary problems across a
range of sizes and reports wall time plus agreement of the dual objectives.

Usage: python benchmarks/bench_smo.py [--sizes 100,300,600] [--repeats 3]
"""

import argparse
import time

import numpy as np

from lithosvm import _smo_py
from lithosvm.kernels import gram_matrix, rbf_kernel
from lithosvm.solver import dual_objective

try:
    from lithosvm import _smo as compiled
except ImportError:
    compiled = None


def make_problem(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 4))
    shift = rng.normal(scale=0.8, size=4)
    d = np.where(X @ np.array([1.0, -0.6, 0.3, 0.2]) + rng.normal(scale=0.4, size=n) > 0, 1.0, -1.0)
    X[d > 0] += 0.3 * shift
    if len(np.unique(d)) < 2:
        d[0] = -d[0]
    return gram_matrix(rbf_kernel(0.8), X), d


def run(solve, G, d, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = solve(G, d, 10.0, 1e-3, 200, 1e-9)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,300,600,1000", help="comma-separated problem sizes")
    parser.add_argument("--repeats", type=int, default=3, help="timed repeats, best kept")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if compiled is None:
        print("compiled backend not built; showing numpy fallback only")
    header = f"{'n':>6} {'python (s)':>12} {'compiled (s)':>13} {'speedup':>8} {'|dW| rel':>10}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        G, d = make_problem(n, seed=n)
        t_py, res_py = run(_smo_py.smo_solve, G, d, args.repeats)
        w_py = dual_objective(res_py[0], d, G)
        if compiled is None:
            print(f"{n:>6} {t_py:>12.4f} {'-':>13} {'-':>8} {'-':>10}")
            continue
        t_c, res_c = run(compiled.smo_solve, G, d, args.repeats)
        w_c = dual_objective(res_c[0], d, G)
        rel = abs(w_c - w_py) / max(1.0, abs(w_py))
        print(f"{n:>6} {t_py:>12.4f} {t_c:>13.4f} {t_py / t_c:>7.1f}x {rel:>10.2e}")


if __name__ == "__main__":
    main()
