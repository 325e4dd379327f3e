"""Time the compiled simplex kernel against the pure-Python twin.

Usage: python benchmarks/bench_kernel.py [--systems N] [--repeat R] [--seed S]
"""

from __future__ import annotations

import argparse
import random
import timeit

from occultist import _kernel


def systems(n, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        nvars = rng.randint(3, 8)
        m = rng.randint(nvars, 3 * nvars)
        rows = [[rng.randint(-50, 50) for _ in range(nvars)] for _ in range(m)]
        rhs = [rng.choice([0, 1]) for _ in range(m)]
        out.append((rows, rhs, [_kernel.GE] * m, nvars))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    batch = systems(args.systems, args.seed)
    solvers = {"python": _kernel.solve_python}
    if _kernel.KERNEL == "cython":
        solvers["cython"] = _kernel.solve
    times = {}
    for name, fn in solvers.items():
        best = min(timeit.repeat(lambda: [fn(*s) for s in batch], number=1, repeat=args.repeat))
        times[name] = best
        print(f"{name:>7}: {best * 1e3:9.2f} ms for {len(batch)} systems")
    if "cython" in times:
        agree = all(_kernel.solve(*s) == _kernel.solve_python(*s) for s in batch)
        print(f"speedup: {times['python'] / times['cython']:.2f}x  identical results: {agree}")
    else:
        print("compiled kernel unavailable; build with pip install -e . --no-build-isolation")


if __name__ == "__main__":
    main()
