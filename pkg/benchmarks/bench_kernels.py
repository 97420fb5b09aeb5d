"""Compare the compiled and pure-Python kernel-sum backends.

    python benchmarks/bench_kernels.py --nodes 200000 1000000 --repeat 5

Prints one line per (backend, size) with the best wall time, and the largest
relative difference between the backends.
"""

import argparse
import time

import numpy as np

from ellipstone.kernels import available_backends, kernel_sums


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, nargs="+", default=[100_000, 1_000_000])
    ap.add_argument("--targets", type=int, default=4)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--grad", action="store_true", help="also accumulate the gradient")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    for n in args.nodes:
        nodes = rng.uniform(-1, 1, size=(n, args.dim))
        weights = rng.uniform(0, 1, size=n) / n
        targets = rng.uniform(2, 3, size=(args.targets, args.dim))
        results = {}
        for b in backends:
            call = lambda: kernel_sums(targets, nodes, weights, args.dim - 2, args.grad, backend=b)  # noqa: E731
            results[b] = call()[0]
            t = best_time(call, args.repeat)
            print(f"{b:>9}  nodes={n:>9}  targets={args.targets}  best={t * 1e3:9.2f} ms"
                  f"  ({n * args.targets / t / 1e6:7.1f} M pairs/s)")
        if len(results) == 2:
            a, b = results.values()
            print(f"           max rel diff {np.max(np.abs(a - b) / np.abs(b)):.2e}")


if __name__ == "__main__":
    main()
