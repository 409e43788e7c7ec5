"""Timing comparison of the numba and numpy kernel backends.

Runs each hot kernel on a realistic grid with both implementations and
prints per-call times plus the speedup.  JIT compilation happens in the
warmup pass, so the numbers are steady-state.  Usage:

    python3 benchmarks/bench_kernels.py [--points N] [--repeats R]

Set RINGQED_NO_NUMBA=1 to confirm the fallback dispatch, though this
script always times both families directly when numba is importable.
"""

import argparse
import math
import time

import numpy as np

from ringqed import kernels


def _workloads(n_points):
    lam = np.linspace(906.5e-9, 913.5e-9, n_points)
    shifted = np.linspace(-1.0, 11.5, n_points)
    edges = np.linspace(-156.25, 156.25, n_points)
    amp = math.exp(-math.pi * 2.2625 / (910e-9 * 1.9e4) * 200e-6 / 2.0)
    return {
        "allpass_transmission": (lam, 2.2625, 200e-6, amp, amp),
        "decay_profile": (shifted, 1.90, 0.0422),
        "g2_comb": (edges, 12.5, 1.0 / 1.90, 12, 2e5, 2.4e3),
    }


def _time_call(fn, args, repeats):
    fn(*args)  # warmup; first numba call compiles
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000,
                    help="grid size per kernel call (default 200000)")
    ap.add_argument("--repeats", type=int, default=20,
                    help="timed calls per kernel, best taken (default 20)")
    args = ap.parse_args()

    work = _workloads(args.points)
    print(f"active backend: {kernels.backend()}   "
          f"grid: {args.points} points, best of {args.repeats}")
    header = f"{'kernel':<22}{'numpy':>12}{'numba':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args in work.items():
        t_np = _time_call(kernels.IMPL_NUMPY[name], call_args, args.repeats)
        if kernels.IMPL_NUMBA is None:
            print(f"{name:<22}{t_np * 1e3:>10.3f} ms{'n/a':>12}{'':>10}")
            continue
        t_nb = _time_call(kernels.IMPL_NUMBA[name], call_args, args.repeats)
        print(f"{name:<22}{t_np * 1e3:>10.3f} ms{t_nb * 1e3:>10.3f} ms"
              f"{t_np / t_nb:>9.1f}x")
    if kernels.IMPL_NUMBA is None:
        print("numba unavailable or disabled; only the numpy family timed")


if __name__ == "__main__":
    main()
