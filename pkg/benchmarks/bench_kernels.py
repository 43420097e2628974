"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from ruelle_kit.kernels import NUMBA_BACKEND, NUMPY_BACKEND


def _best(fn, repeat):
    fn()  # warm-up (triggers compilation / cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    num = np.array([0.3 + 0.1j, -0.2, 0.05j, 1.0])
    den = np.array([1.0 + 0j])
    pts = 0.8 * (rng.normal(size=200_000) + 1j * rng.normal(size=200_000))
    rows = rng.normal(size=(20_000, 7)) + 1j * rng.normal(size=(20_000, 7))
    vals = rng.normal(size=1_000_000) + 1j * rng.normal(size=1_000_000)
    return {
        "rational_jet (2e5 points)": lambda be: be.rational_jet(num, den, pts),
        "iterate_jet n=8 (2e5 points)": lambda be: be.iterate_jet(num, den, pts, 8),
        "aberth_batch (2e4 sextics)": lambda be: be.aberth_batch(rows, 1e-14, 500),
        "orbit (4096 steps)": lambda be: be.orbit(num, den, 0.1 + 0.05j, 4096, 1e150),
        "compensated_sum (1e6 values)": lambda be: be.compensated_sum(vals),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = [NUMPY_BACKEND] + ([NUMBA_BACKEND] if NUMBA_BACKEND else [])
    print(f"{'kernel':32s}" + "".join(f"{b.name:>12s}" for b in backends) + f"{'speedup':>10s}")
    for name, fn in cases(rng).items():
        t = [_best(lambda: fn(be), args.repeat) for be in backends]
        speed = f"{t[0] / t[1]:9.1f}x" if len(t) > 1 else ""
        print(f"{name:32s}" + "".join(f"{x * 1e3:10.2f}ms" for x in t) + speed)


if __name__ == "__main__":
    main()
