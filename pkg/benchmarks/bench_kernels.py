"""Time the finite-field kernels under both backends.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call per kernel includes JIT compilation and is reported
separately as ``warmup``.
"""
import argparse
import time

import numpy as np

from torsdiv import _accel
from torsdiv import replab as rl


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    word3 = rl.encode_word(rl.twisted_whitehead(3).relators[0])
    rng = np.random.default_rng(0)
    M = 11**8
    A = rng.integers(0, M, size=(9, 9), dtype=np.int64)
    B = rng.integers(0, M, size=(9, 9), dtype=np.int64)
    return {
        "census n=3 p=61": lambda b: _accel.census(word3, 3, 61, b),
        "points n=3 p=61": lambda b: _accel.points(3, 61, b),
        "series_mul D=8 M=11^8": lambda b: _accel.series_mul(A, B, 8, M, b),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _accel.HAVE_NUMBA else [])
    print(f"{'kernel':<24}{'backend':<8}{'warmup ms':>11}{'best ms':>10}")
    for name, fn in cases().items():
        ref = None
        for b in backends:
            t = time.perf_counter()
            out = fn(b)
            warm = time.perf_counter() - t
            if ref is None:
                ref = out
            elif not np.array_equal(np.asarray(ref, dtype=object), np.asarray(out, dtype=object)):
                raise SystemExit(f"{name}: backends disagree")
            best = _best(lambda: fn(b), args.repeat)
            print(f"{name:<24}{b:<8}{warm * 1e3:>11.1f}{best * 1e3:>10.2f}")


if __name__ == "__main__":
    main()
