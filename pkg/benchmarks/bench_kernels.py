#!/usr/bin/env python3
"""Benchmark the compiled convolution kernels against the pure fallback.

Times the two raw kernels and one end-to-end workload (Weierstrass
division round-trips, the hot loop of the acceptance suite).  The compiled
backend is skipped gracefully when the extension is not built.

Run:  python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

from iwaheights import _kernels_py

try:
    from iwaheights import _speedups
except ImportError:
    _speedups = None


def bench(fn, *args, repeat=2000):
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return time.perf_counter() - t0


def bench_divisions(repeat):
    from iwaheights.iwalg import IwasawaPoly, RingSpec, weierstrass_divide

    spec = RingSpec(3, 2, 24)
    rng = random.Random(0)
    pairs = []
    while len(pairs) < 50:
        f = IwasawaPoly(spec, [rng.randrange(9) for _ in range(25)])
        g = IwasawaPoly(spec, [rng.randrange(9) for _ in range(25)])
        if any(spec.is_unit(c) for c in f.coeffs):
            pairs.append((g, f))
    t0 = time.perf_counter()
    for _ in range(repeat // 50 or 1):
        for g, f in pairs:
            weierstrass_divide(g, f)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5000)
    args = parser.parse_args()

    rng = random.Random(1)
    a = [rng.randrange(9) for _ in range(32)]
    b = [rng.randrange(9) for _ in range(32)]
    ca = [rng.randrange(9) for _ in range(27)]
    cb = [rng.randrange(9) for _ in range(27)]

    rows = []
    backends = [("python", _kernels_py)]
    if _speedups is not None:
        backends.append(("cython", _speedups))

    for name, mod in backends:
        t_poly = bench(mod.poly_mul_trunc, a, b, 9, 40, repeat=args.repeat)
        t_cyc = bench(mod.cyclic_mul, ca, cb, 9, repeat=args.repeat)
        rows.append((name, t_poly, t_cyc))

    print(f"{'backend':<10}{'poly_mul_trunc':>16}{'cyclic_mul':>14}")
    for name, t_poly, t_cyc in rows:
        print(f"{name:<10}{t_poly:>14.4f}s{t_cyc:>12.4f}s")
    if len(rows) == 2:
        print(
            f"{'speedup':<10}{rows[0][1] / rows[1][1]:>14.1f}x"
            f"{rows[0][2] / rows[1][2]:>12.1f}x"
        )
    else:
        print("(compiled backend not built; showing pure Python only)")

    t_div = bench_divisions(args.repeat)
    from iwaheights import kernels

    print(f"\nend-to-end division workload ({kernels.BACKEND} backend): {t_div:.4f}s")


if __name__ == "__main__":
    main()
