"""Compare the compiled and pure-Python eigenvalue kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 2000]

Times the kernel behind the kappa-search objective (minimum eigenvalue of
``n_i . s`` for every frame vector) and a short hill-climbing search run
under each backend.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from blochpovm.kernels import available_backends
from blochpovm.su_basis import generate_su_basis

CASES = [(2, 4), (3, 3), (3, 9), (4, 16), (6, 36), (8, 64)]

SEARCH_SNIPPET = """
import time
from blochpovm import kernels
from blochpovm.search import SearchConfig, optimize_orientation
from blochpovm.su_basis import generate_su_basis
t = time.perf_counter()
r = optimize_orientation(SearchConfig(3, 9, restarts=2, max_iterations=1500, master_seed=0), generate_su_basis(3))
print(kernels.BACKEND, time.perf_counter() - t, r.best_kappa)
"""


def bench_kernels(repeat):
    backends = available_backends()
    rng = np.random.default_rng(0)
    names = sorted(backends)
    print(f"{'d':>3} {'N':>4} " + " ".join(f"{n + ' [us]':>14}" for n in names) + "   speedup")
    for d, n in CASES:
        g = generate_su_basis(d).generators
        v = rng.standard_normal((n, d * d - 1))
        times = {}
        for name in names:
            fn = backends[name].directional_min_eigenvalues
            times[name] = min(timeit.repeat(lambda: fn(v, g), number=repeat, repeat=3)) / repeat * 1e6
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{d:>3} {n:>4} " + " ".join(f"{times[k]:>14.2f}" for k in names) + f"   {speed:7.2f}x")


def bench_search():
    print("\nkappa search, d=3 N=9, 2 restarts x 1500 iterations")
    for pure in ("", "1"):
        env = dict(os.environ, BLOCHPOVM_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", SEARCH_SNIPPET], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:>7}: {float(out[1]):6.2f}s  best kappa {float(out[2]):.6f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=2000)
    parser.add_argument("--skip-search", action="store_true")
    args = parser.parse_args()
    bench_kernels(args.repeat)
    if not args.skip_search:
        bench_search()


if __name__ == "__main__":
    main()
