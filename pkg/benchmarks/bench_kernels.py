"""Compare the compiled and numpy stage kernels.

Usage: python3 benchmarks/bench_kernels.py [--horizon 10] [--repeat 5]

For each interpolation mode, times a full backward solve with each backend
(best of ``--repeat``) and checks that the resulting tables are identical.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from symdispatch.kernels import compiled_available
from symdispatch.solver import MODES, solve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizon", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = ["python"] + (["cython"] if compiled_available() else [])
    if len(backends) == 1:
        print("compiled extension not built; timing the numpy backend only")

    print(f"{'mode':8s} {'backend':8s} {'best (s)':>10s} {'speedup':>8s}")
    identical = True
    for mode in MODES:
        tables, best = {}, {}
        for name in backends:
            tables[name] = solve(args.horizon, mode=mode, backend=name)
            best[name] = min(
                timeit.repeat(
                    lambda: solve(args.horizon, mode=mode, backend=name),
                    number=1,
                    repeat=args.repeat,
                )
            )
        for name in backends:
            speedup = best["python"] / best[name]
            print(f"{mode:8s} {name:8s} {best[name]:10.4f} {speedup:7.1f}x")
        if "cython" in tables:
            a, b = tables["python"], tables["cython"]
            same = all(
                np.array_equal(x, y)
                for x, y in (
                    (a.values, b.values),
                    (a.gamma_high, b.gamma_high),
                    (a.gamma_low, b.gamma_low),
                )
            )
            identical &= same
            print(f"{mode:8s} tables identical across backends: {same}")
    return 0 if identical else 1


if __name__ == "__main__":
    sys.exit(main())
