"""Compare the numba and numpy synthesis kernels on full search levels.

    python benchmarks/bench_synthesis.py --lengths 6 8 10 12 --gates 2 3
"""
import argparse
import time

import numpy as np

from qpc import _kernels
from qpc.linalg import random_unitary


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lengths", type=int, nargs="+", default=[6, 8, 10, 12])
    ap.add_argument("--gates", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    backends = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])
    if "numba" in backends:
        # compile outside the timed region
        _kernels.search_level(np.eye(2, dtype=complex)[None], np.eye(2, dtype=complex), 1, 0.0, backend="numba")

    print(f"{'g':>3} {'len':>4} {'nodes':>10} " + " ".join(f"{b + ' [s]':>12}" for b in backends) + f" {'speedup':>8}")
    for g in args.gates:
        gates = np.stack([random_unitary(args.dim, rng) for _ in range(g)])
        target = random_unitary(args.dim, rng)
        for length in args.lengths:
            # tol = 0 forces a full level scan
            timings = {b: best_time(lambda b=b: _kernels.search_level(gates, target, length, 0.0, backend=b),
                                    args.repeat) for b in backends}
            row = f"{g:>3} {length:>4} {g**length:>10} " + " ".join(f"{timings[b]:>12.4f}" for b in backends)
            if len(backends) == 2:
                row += f" {timings['numpy'] / timings['numba']:>8.1f}"
            print(row)


if __name__ == "__main__":
    main()
