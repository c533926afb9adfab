#!/usr/bin/env python3
"""Benchmark the primitive-vector counting kernels: numba njit vs pure numpy.

Runs the same exact counts through both code paths and prints a timing
table.  The njit path is warmed up first so JIT compilation is not billed
to the measurement.  Run from the repository root:

    python benchmarks/bench_schanuel.py [--repeats 3]

If numba is unavailable (or ORBITHEIGHT_BACKEND=numpy is exported), only
the numpy path is timed.
"""

from __future__ import annotations

import argparse
import time

from orbitheight import kernels

CASES = [
    # (projective dim n, bound B) -> box (2B+1)^(n+1)
    (1, 250),
    (1, 1000),
    (2, 50),
    (2, 100),
    (3, 15),
]


def _time(fn, k, box, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(k, box, 0, 2 * box + 1)
        best = min(best, time.perf_counter() - t0)
    return result, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats, best wins")
    args = parser.parse_args()

    have_njit = kernels.HAS_NUMBA
    if have_njit:
        kernels.count_coprime_range_njit(2, 3, 0, 7)  # warm up the JIT

    header = f"{'n':>2} {'B':>5} {'box':>12} {'count':>12} {'numpy[s]':>10}"
    if have_njit:
        header += f" {'numba[s]':>10} {'speedup':>8}"
    print(header)
    for n, box in CASES:
        k = n + 1
        size = (2 * box + 1) ** k
        np_count, np_time = _time(kernels.count_coprime_range_numpy, k, box, args.repeats)
        line = f"{n:>2} {box:>5} {size:>12} {np_count // 2:>12} {np_time:>10.4f}"
        if have_njit:
            nb_count, nb_time = _time(kernels.count_coprime_range_njit, k, box, args.repeats)
            if nb_count != np_count:
                raise SystemExit(
                    f"backend mismatch at n={n} B={box}: njit {nb_count} numpy {np_count}"
                )
            line += f" {nb_time:>10.4f} {np_time / nb_time:>7.1f}x"
        print(line)
    if not have_njit:
        print("\nnumba unavailable or disabled; timed the numpy path only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
