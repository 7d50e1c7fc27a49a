"""Compare the numba-compiled and pure-numpy bilinear kernels.

Usage:

    python3 benchmarks/backend_bench.py [--size 256] [--channels 8] [--reps 20]

Reports wall time per call for the forward sample and its image VJP, and
verifies the two implementations agree bit-for-bit on the benchmark inputs.
"""

import argparse
import time

import numpy as np

from makeupkit import kernels
from makeupkit.backend import HAS_NUMBA


def time_fn(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=256)
    ap.add_argument("--channels", type=int, default=8)
    ap.add_argument("--reps", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    h = w = args.size
    image = rng.normal(size=(h, w, args.channels))
    grid = np.stack(
        [rng.uniform(-2.0, w + 2.0, (h, w)), rng.uniform(-2.0, h + 2.0, (h, w))],
        axis=-1,
    )
    cot = rng.normal(size=(h, w, args.channels))

    rows = []
    fwd_np = lambda: kernels.bilinear_forward_np(image, grid)
    vjp_np = lambda: kernels.bilinear_vjp_image_np(image.shape, grid, cot)
    rows.append(("numpy forward", time_fn(fwd_np, args.reps)))
    rows.append(("numpy vjp", time_fn(vjp_np, args.reps)))

    if HAS_NUMBA:
        fwd_nb = lambda: kernels.bilinear_forward_nb(image, grid)
        vjp_nb = lambda: kernels.bilinear_vjp_image_nb(image.shape, grid, cot)
        fwd_nb()  # JIT warmup
        vjp_nb()
        rows.append(("numba forward", time_fn(fwd_nb, args.reps)))
        rows.append(("numba vjp", time_fn(vjp_nb, args.reps)))
        same_fwd = np.array_equal(fwd_np(), fwd_nb())
        same_vjp = np.array_equal(vjp_np(), vjp_nb())
    else:
        same_fwd = same_vjp = None

    print(f"bilinear kernels, {h}x{w}x{args.channels}, best of {args.reps}")
    for name, t in rows:
        print(f"  {name:16} {t * 1e3:9.3f} ms")
    if HAS_NUMBA:
        print(f"  forward bit-identical: {same_fwd}")
        print(f"  vjp     bit-identical: {same_vjp}")
    else:
        print("  numba unavailable; numpy fallback only")


if __name__ == "__main__":
    main()
