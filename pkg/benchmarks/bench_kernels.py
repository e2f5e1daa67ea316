"""Time the compiled queue kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--frames N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from rfvlc import _kernels_py

try:
    from rfvlc import _kernels
except ImportError:
    _kernels = None


def bench(mod, a, service, repeat):
    q = mod.lindley(a, service)
    t_l = min(timeit.repeat(lambda: mod.lindley(a, service), number=1, repeat=repeat))
    t_d = min(timeit.repeat(lambda: mod.fcfs_delays(a, q), number=1, repeat=repeat))
    return t_l, t_d


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--frames", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    service = rng.exponential(1.0, args.frames)
    a = 0.95
    rows = [("python", *bench(_kernels_py, a, service, args.repeat))]
    if _kernels is not None:
        rows.append(("cython", *bench(_kernels, a, service, args.repeat)))
        assert np.array_equal(_kernels.lindley(a, service), _kernels_py.lindley(a, service))
    print(f"{args.frames} frames, best of {args.repeat}")
    print(f"{'backend':<8} {'lindley s':>10} {'delays s':>10} {'Mframes/s':>10}")
    for name, t_l, t_d in rows:
        print(f"{name:<8} {t_l:>10.4f} {t_d:>10.4f} {args.frames / (t_l + t_d) / 1e6:>10.2f}")
    if len(rows) == 2:
        print(f"speedup {(rows[0][1] + rows[0][2]) / (rows[1][1] + rows[1][2]):.0f}x")


if __name__ == "__main__":
    main()
