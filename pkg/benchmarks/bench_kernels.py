"""Compare the compiled and pure-Python Metropolis sweep kernels.

Both kernels consume the same pre-drawn uniforms, so besides timing them this
also checks that they leave bit-identical lattices behind.

    python3 benchmarks/bench_kernels.py --sizes 10 20 40 --sweeps 50
"""
import argparse
import time

import numpy as np

from qmlkit.ising import acceptance_table
from qmlkit.ising._backend import KERNELS


def time_kernel(fn, spins, uniforms, accept, repeats):
    best = np.inf
    for _ in range(repeats):
        s = spins.copy()
        t0 = time.perf_counter()
        fn(s, uniforms, accept)
        best = min(best, time.perf_counter() - t0)
    return best, s


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[10, 20, 40])
    parser.add_argument("--sweeps", type=int, default=50)
    parser.add_argument("--temperature", type=float, default=2.269)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if "cython" not in KERNELS:
        print("compiled kernel not built; timing the Python kernel only")
    accept = acceptance_table(args.temperature)
    print(f"{'L':>4} {'kernel':>8} {'sweeps/s':>12} {'ns/site':>9} {'speedup':>8}")
    for L in args.sizes:
        rng = np.random.default_rng(args.seed)
        spins = rng.choice(np.array([-1, 1], dtype=np.int8), size=(L, L))
        uniforms = rng.random((args.sweeps, L, L))
        results = {name: time_kernel(fn, spins, uniforms, accept, args.repeats) for name, fn in KERNELS.items()}
        base = results["python"][0]
        for name, (t, _) in results.items():
            print(f"{L:>4} {name:>8} {args.sweeps / t:>12.1f} {1e9 * t / (args.sweeps * L * L):>9.1f} "
                  f"{base / t:>7.1f}x")
        if "cython" in results:
            assert np.array_equal(results["python"][1], results["cython"][1]), "kernels disagree"


if __name__ == "__main__":
    main()
