"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--rows 262144] [--n 5] [--repeat 5]

Both paths are run on the same inputs; outputs are compared before timing.
"""
import argparse
import time

import numpy as np

from rwsum import _accel, kernels


def _inputs(rows, n, seed=1):
    rng = np.random.default_rng(seed)
    X = 1.0 / rng.random((rows, n)) - 2.0
    W = np.cumprod(0.2 / np.sqrt(rng.random((rows, n))), axis=1)
    Z = np.ascontiguousarray(X * W)
    tau = rng.integers(1, n + 1, rows)
    return Z, W, tau


def _grid_inputs(K=6001, m=1000, pts=6001):
    s = np.linspace(-30, 30, K)
    logpsi = -np.logaddexp(0.0, s)
    z = np.linspace(-5, 20, m)
    w = np.full(m, 1.0 / m)
    return logpsi, float(s[0]), float(s[1] - s[0]), z, w, 0.0, s[:pts].copy()


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=1 << 18)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.numba_available():
        print("numba not installed; only the numpy path exists")
        return 1
    Z, W, tau = _inputs(args.rows, args.n)
    x = 1e3
    cases = [
        ("exceed(sum)", kernels.exceed, (Z, x, False)),
        ("exceed(ruin)", kernels.exceed, (Z, x, True)),
        ("last_threshold(ruin)", kernels.last_threshold, (Z, W, x, True)),
        ("ak_thresholds(sum)", kernels.ak_thresholds, (Z, W, x, False)),
        ("ak_thresholds(ruin)", kernels.ak_thresholds, (Z, W, x, True)),
        ("stopped", kernels.stopped, (Z, W, tau, x)),
        ("grid_expect", kernels.grid_expect, _grid_inputs()),
    ]
    print(f"rows={args.rows} n={args.n} repeat={args.repeat} (best of)")
    print(f"{'kernel':<22} {'numba [ms]':>11} {'numpy [ms]':>11} {'speedup':>8}")
    for name, fn, a in cases:
        out_nb = fn.numba_impl(*a)   # compile outside the timing
        out_np = fn.numpy_impl(*a)
        for u, v in zip(np.atleast_1d(out_nb) if not isinstance(out_nb, tuple) else out_nb,
                        np.atleast_1d(out_np) if not isinstance(out_np, tuple) else out_np):
            if not np.allclose(u, v, rtol=1e-12, atol=0.0, equal_nan=True):
                raise SystemExit(f"{name}: numba and numpy outputs differ")
        t_nb = _time(fn.numba_impl, a, args.repeat)
        t_np = _time(fn.numpy_impl, a, args.repeat)
        print(f"{name:<22} {1e3 * t_nb:>11.2f} {1e3 * t_np:>11.2f} {t_np / t_nb:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
