"""Benchmark the compiled update kernels against the numpy fallback.

Times each fused kernel (sofim, sgd_momentum, adam) on both backends over
a range of dimensions and prints a per-step comparison table.  The two
backends share one process, so the numbers are directly comparable.

Usage:
    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --dims 1000 100000 --repeats 500
"""

import argparse
import statistics
import time

import numpy as np

from sofim._kernels import _numpy as numpy_backend

try:
    from sofim._kernels import _fused as cython_backend
except ImportError:
    cython_backend = None

WARMUPS = 5


def _buffers(kernel: str, d: int, rng: np.random.Generator) -> dict:
    g = rng.standard_normal(d)
    buf = {"w": rng.standard_normal(d), "g": g}
    if kernel in ("sofim", "sgd_momentum"):
        buf["m"] = np.zeros(d)
    if kernel == "adam":
        buf["m"] = np.zeros(d)
        buf["v"] = np.zeros(d)
    return buf


def _call(module, kernel: str, buf: dict, t: int) -> None:
    if kernel == "sofim":
        module.sofim_update(buf["w"], buf["m"], buf["g"], 0.9, 1.0 - 0.9 ** t, 0.01, 0.5)
    elif kernel == "sgd_momentum":
        module.sgd_momentum_update(buf["w"], buf["m"], buf["g"], 0.01, 0.9, 1e-6)
    else:
        module.adam_update(buf["w"], buf["m"], buf["v"], buf["g"], 0.001, 0.9, 0.999,
                           1.0 - 0.9 ** t, 1.0 - 0.999 ** t, 1e-8)


def time_kernel(module, kernel: str, d: int, repeats: int, seed: int) -> float:
    """Median seconds per step, after a few warmup steps."""
    rng = np.random.default_rng(seed)
    buf = _buffers(kernel, d, rng)
    t = 0
    for _ in range(WARMUPS):
        t += 1
        _call(module, kernel, buf, t)
    samples = []
    for _ in range(repeats):
        t += 1
        start = time.perf_counter()
        _call(module, kernel, buf, t)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+",
                        default=[1_000, 10_000, 100_000, 1_000_000])
    parser.add_argument("--repeats", type=int, default=200)
    parser.add_argument("--kernels", nargs="+",
                        default=["sofim", "sgd_momentum", "adam"],
                        choices=["sofim", "sgd_momentum", "adam"])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if cython_backend is None:
        print("compiled backend unavailable; timing the numpy fallback only")
    header = f"{'kernel':<14}{'d':>10}{'cython':>12}{'numpy':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for kernel in args.kernels:
        for d in args.dims:
            numpy_s = time_kernel(numpy_backend, kernel, d, args.repeats, args.seed)
            if cython_backend is not None:
                cython_s = time_kernel(cython_backend, kernel, d, args.repeats, args.seed)
                speedup = numpy_s / cython_s
                print(f"{kernel:<14}{d:>10,}{cython_s * 1e6:>10.1f}us"
                      f"{numpy_s * 1e6:>10.1f}us{speedup:>8.2f}x")
            else:
                print(f"{kernel:<14}{d:>10,}{'-':>12}{numpy_s * 1e6:>10.1f}us{'-':>9}")


if __name__ == "__main__":
    main()
