"""Benchmark the JIT kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py [--size N] [--repeats K]
"""

import argparse
import time

import numpy as np

from diams import _kernels


def make_curves(n, seed=7):
    rng = np.random.default_rng(seed)
    t = np.linspace(-1.0, 1.0, n)
    a = np.stack([t, t ** 2 + 0.1 * rng.standard_normal(n) / n,
                  np.ones_like(t)], axis=1)
    b = np.stack([t, -t ** 2 + t ** 3, np.zeros_like(t)], axis=1)
    return a, b


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=600,
                    help="points per curve (grid is size x size)")
    ap.add_argument("--subdiv", type=int, default=4)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    a, b = make_curves(args.size)
    base = np.zeros(3)
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba unavailable; nothing to compare")
    nb_omega, nb_integrate, nb_bilinear = _kernels._build_numba_kernels()

    # warm the JIT before timing
    nb_omega(a[:4], b[:4])
    nb_integrate(a[:4], b[:4], 0, 0, base)
    nb_bilinear(nb_integrate(a[:4], b[:4], 0, 0, base), 2)

    f = _kernels._np_integrate_positions(a, b, 0, 0, base)
    small = f[:120, :120]

    rows = [
        ("omega_grid", lambda: _kernels._np_omega_grid(a, b),
         lambda: nb_omega(a, b)),
        ("integrate_positions",
         lambda: _kernels._np_integrate_positions(a, b, 0, 0, base),
         lambda: nb_integrate(a, b, 0, 0, base)),
        (f"bilinear_sample(subdiv={args.subdiv})",
         lambda: _kernels._np_bilinear_sample(small, args.subdiv),
         lambda: nb_bilinear(small, args.subdiv)),
    ]
    print(f"curve points: {args.size}, grid {args.size}x{args.size}, "
          f"best of {args.repeats}")
    print(f"{'kernel':<28} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, np_fn, nb_fn in rows:
        tn = timeit(np_fn, args.repeats)
        tb = timeit(nb_fn, args.repeats)
        assert np.array_equal(np_fn(), nb_fn()), "backends disagree"
        print(f"{name:<28} {tn * 1e3:>8.2f}ms {tb * 1e3:>8.2f}ms "
              f"{tn / tb:>7.1f}x")


if __name__ == "__main__":
    main()
