"""Wall-clock comparison of the numba and numpy window-max kernels.

    python3 benchmarks/bench_kernels.py [--trials N] [--m M] [--m-alpha MA] [--repeat R]

Both backends run on identical inputs; the script checks their outputs agree
bit for bit before reporting timings.
"""
import argparse
import timeit

import numpy as np

from quadbounds import _kernels


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=8192)
    parser.add_argument("--m", type=int, default=6)
    parser.add_argument("--m-alpha", type=int, default=300)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    length = args.m + args.m_alpha - 1
    w = np.random.default_rng(0).standard_normal((args.trials, length))
    mu = np.full(length, 0.1)
    sigma = np.full(length, 0.02)
    call = (w, mu, sigma, 937.5, -125.0, np.log(0.25), args.m, args.m - 1)

    if _kernels.BACKEND != "numba":
        print("numba unavailable or disabled; timing the numpy backend only")
    kernels = {"numpy": _kernels.window_max_numpy}
    if _kernels.BACKEND == "numba":
        kernels["numba"] = _kernels.window_max
        _kernels.window_max(*call)  # compile outside the timing
        same = _kernels.window_max(*call).tobytes() == _kernels.window_max_numpy(*call).tobytes()
        print(f"outputs identical: {same}")

    print(f"trials={args.trials} window={args.m} runs={length} samples")
    best = {}
    for name, fn in kernels.items():
        best[name] = min(timeit.repeat(lambda: fn(*call), number=1, repeat=args.repeat))
        rate = args.trials * length / best[name] / 1e6
        print(f"{name:>6}: {best[name] * 1e3:9.2f} ms  ({rate:7.1f} M samples/s)")
    if len(best) == 2:
        print(f"speedup: {best['numpy'] / best['numba']:.1f}x")


if __name__ == "__main__":
    main()
