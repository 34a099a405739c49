"""Compare the compiled geometry kernels against the pure-Python fallback.

The fallback is selected by the SHALLOWRANGE_PURE_PYTHON environment
variable at import time, so the comparison here imports both kernel
modules directly rather than spawning subprocesses.

Run:  python3 benchmarks/bench_kernels.py [--n 200000] [--reps 20]
"""

import argparse
import time

import numpy as np

from shallowrange import _pykernels
from shallowrange import kernels


def _bench(fn, args, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--reps", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    xs = rng.uniform(0, 1, args.n)
    ys = rng.uniform(0, 1, args.n)

    cases = [
        ("orient_det", (0.1, 0.2, 0.9, 0.8, xs, ys)),
        ("halfplane_mask", (xs, ys, 0.3, 0.7, 0.4, 1e-12)),
        ("disk_mask", (xs, ys, 0.5, 0.5, 0.25, 1e-12)),
    ]

    print(f"active backend: {kernels.BACKEND}, n={args.n}, reps={args.reps}")
    print(f"{'kernel':<16} {'compiled (ms)':>14} {'python (ms)':>12} {'speedup':>8}")
    for name, a in cases:
        fast = getattr(kernels, name)
        slow = getattr(_pykernels, name)
        got_fast = fast(*a)
        got_slow = slow(*a)
        assert np.allclose(got_fast, got_slow), f"{name}: backends disagree"
        t_fast = _bench(fast, a, args.reps) * 1e3
        t_slow = _bench(slow, a, args.reps) * 1e3
        print(f"{name:<16} {t_fast:>14.3f} {t_slow:>12.3f} {t_slow / t_fast:>7.1f}x")


if __name__ == "__main__":
    main()
