"""Compare the compiled and pure kernels on the Monte Carlo workload.

The hot loop of the match-probability estimator sorts batches of random
rows and counts those within Hamming distance tau of a fixed sorted
vector.  Run:

    python3 benchmarks/bench_kernels.py [--trials N]
"""

import argparse
import time

import numpy as np

from tracecloak.kernels import _pure

try:
    from tracecloak.kernels import _speedups
except ImportError:
    _speedups = None

CASES = [  # (p, n, tau)
    (11, 5, 2),
    (31, 10, 4),
    (101, 100, 2),
    (503, 100, 20),
]


def bench(impl, p: int, n: int, tau: int, trials: int, chunk: int = 2**16):
    rng = np.random.default_rng(0)
    e = np.sort(rng.integers(0, p, size=n, dtype=np.int64))
    hits = 0
    start = time.perf_counter()
    remaining = trials
    while remaining:
        batch = min(chunk, remaining)
        z = rng.integers(0, p, size=(batch, n), dtype=np.int64)
        hits += impl.count_sorted_within(z, e, tau)
        remaining -= batch
    return hits, time.perf_counter() - start


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=10**6)
    args = parser.parse_args()

    impls = [("pure", _pure)]
    if _speedups is not None:
        impls.append(("compiled", _speedups))
    else:
        print("compiled extension not built; benchmarking the fallback only")

    print(f"{'case':>16} {'backend':>9} {'trials/s':>12} {'seconds':>9}  hits")
    for p, n, tau in CASES:
        results = {}
        for name, impl in impls:
            hits, seconds = bench(impl, p, n, tau, args.trials)
            results[name] = (hits, seconds)
            rate = args.trials / seconds
            print(
                f"p={p:<4} n={n:<3} t={tau:<3} {name:>9} {rate:12.0f} "
                f"{seconds:9.3f}  {hits}"
            )
        if len(results) == 2:
            assert results["pure"][0] == results["compiled"][0], "backends disagree"
            speedup = results["pure"][1] / results["compiled"][1]
            print(f"{'':>26} speedup {speedup:.1f}x")


if __name__ == "__main__":
    main()
