"""Timing comparison of the compiled kernel core against the NumPy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py

Each kernel is timed over several input sizes; outputs are checked for
bitwise agreement first, so a speedup never comes from a different answer.
"""

import time

import numpy as np

from freqsteer._kernels import numpy_backend
from freqsteer.spectral import gaussian_kernel1d

try:
    from freqsteer._kernels import _fastcore
except ImportError:
    _fastcore = None


def timeit(fn, *args, repeats=7):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_blur(backend, size):
    g = np.random.default_rng(0)
    x = g.standard_normal((3, size, size))
    k = gaussian_kernel1d(9, 1.5)
    return timeit(backend.blur2d, x, k)


def bench_radial(backend, size):
    g = np.random.default_rng(1)
    power = g.random(size * size)
    bins = (g.integers(0, 12, size * size)).astype(np.int64)
    return timeit(backend.radial_power, power, bins, 12)


def bench_dot(backend, n):
    g = np.random.default_rng(2)
    a, b = g.standard_normal(n), g.standard_normal(n)
    return timeit(backend.dot_widened, a, b)


def verify():
    g = np.random.default_rng(3)
    x = g.standard_normal((3, 64, 64))
    k = gaussian_kernel1d(9, 1.5)
    assert numpy_backend.blur2d(x, k).tobytes() == _fastcore.blur2d(x, k).tobytes()
    p = g.random(4096)
    b = g.integers(0, 12, 4096).astype(np.int64)
    assert np.array_equal(numpy_backend.radial_power(p, b, 12),
                          _fastcore.radial_power(p, b, 12))
    a, c = g.standard_normal(4096), g.standard_normal(4096)
    assert numpy_backend.dot_widened(a, c) == _fastcore.dot_widened(a, c)
    print("outputs agree bitwise\n")


def main():
    if _fastcore is None:
        print("compiled core not importable; build it with: pip install -e . --no-build-isolation")
        return
    verify()
    rows = []
    for size in (32, 64, 128, 256):
        rows.append((f"blur2d 3x{size}x{size}",
                     bench_blur(numpy_backend, size), bench_blur(_fastcore, size)))
    for size in (64, 128, 256):
        rows.append((f"radial_power {size * size} cells",
                     bench_radial(numpy_backend, size), bench_radial(_fastcore, size)))
    for n in (4096, 65536, 1048576):
        rows.append((f"dot_widened n={n}",
                     bench_dot(numpy_backend, n), bench_dot(_fastcore, n)))
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_np, t_c in rows:
        print(f"{name:<{width}}  {t_np * 1e6:>8.1f}us  {t_c * 1e6:>8.1f}us  {t_np / t_c:>7.2f}x")


if __name__ == "__main__":
    main()
