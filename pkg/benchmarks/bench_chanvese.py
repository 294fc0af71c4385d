"""Benchmark: compiled contour kernel vs the pure-Python fallback.

Times the flip passes on synthetic lesions at several sizes and checks
that both backends return identical masks. Run from the repo root:

    python benchmarks/bench_chanvese.py
"""
import pathlib
import sys
import time

import numpy as np

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from lesionkit import _purecv  # noqa: E402
from lesionkit import segmentation  # noqa: E402
from lesionkit.imaging import FloatPlane, gaussian_filter  # noqa: E402

try:
    from lesionkit import _fastcv
except ImportError:
    _fastcv = None


def fixture(size, seed=11):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size]
    r = size * 0.22
    blob = (yy - size / 2) ** 2 + (xx - size / 2) ** 2 < r * r
    raw = np.where(blob, 60.0, 180.0) + rng.normal(0, 25.0, (size, size))
    return gaussian_filter(FloatPlane(np.clip(raw, 0, 255)), 5, 1.0)


def run_with(backend, plane, repeats):
    segmentation.expand_pass = backend.expand_pass
    segmentation.shrink_pass = backend.shrink_pass
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = segmentation.chan_vese_segment(plane)
        best = min(best, time.perf_counter() - t0)
    return best, result


def kernel_micro(size, seed=23):
    """Time one expand pass over a dense candidate list, kernel only."""
    rng = np.random.default_rng(seed)
    intens = np.ascontiguousarray(rng.random((size, size)))
    out = {}
    for name, backend in (("pure", _purecv), ("compiled", _fastcv)):
        labels = (rng.random((size, size)) < 0.5).astype(np.uint8)
        cand = np.arange(size * size, dtype=np.int64)
        t0 = time.perf_counter()
        backend.expand_pass(labels, intens, cand, 0.3, 0.7, 1.0, 1.0, 0.1)
        out[name] = time.perf_counter() - t0
    return out


def main():
    if _fastcv is None:
        print("compiled kernel not built;"
              " run `python setup.py build_ext --inplace` first")
        return
    print("end-to-end segmentation (includes per-sweep candidate bookkeeping):")
    print(f"{'size':>6} {'sweeps':>7} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}")
    originals = (segmentation.expand_pass, segmentation.shrink_pass)
    try:
        for size in (100, 200, 400, 512):
            plane = fixture(size)
            repeats = 3 if size <= 200 else 1
            t_pure, r_pure = run_with(_purecv, plane, repeats)
            t_fast, r_fast = run_with(_fastcv, plane, repeats)
            assert np.array_equal(r_pure.mask.bits, r_fast.mask.bits), "backends diverged"
            print(
                f"{size:>6} {r_fast.iterations_used:>7} {t_pure * 1e3:>10.1f} "
                f"{t_fast * 1e3:>14.1f} {t_pure / t_fast:>7.1f}x"
            )
    finally:
        segmentation.expand_pass, segmentation.shrink_pass = originals
    print("masks identical across backends at every size")

    print("\nflip-pass kernel alone (one dense pass):")
    print(f"{'size':>6} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}")
    for size in (128, 256, 512):
        t = kernel_micro(size)
        print(
            f"{size:>6} {t['pure'] * 1e3:>10.1f} {t['compiled'] * 1e3:>14.1f} "
            f"{t['pure'] / t['compiled']:>7.1f}x"
        )


if __name__ == "__main__":
    main()
