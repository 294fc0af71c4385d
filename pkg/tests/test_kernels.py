"""The compiled and pure-Python contour kernels must be interchangeable:
same flips, same masks, bit for bit."""
import numpy as np
import pytest

from lesionkit import _purecv

fast = pytest.importorskip("lesionkit._fastcv", reason="compiled kernel not built")


def random_state(rng):
    h, w = (int(v) for v in rng.integers(6, 48, 2))
    labels = (rng.random((h, w)) < rng.uniform(0.2, 0.8)).astype(np.uint8)
    intens = np.ascontiguousarray(rng.random((h, w)))
    cand = np.flatnonzero(rng.random(h * w) < 0.6).astype(np.int64)
    return labels, intens, cand


def test_expand_pass_bit_identical(rng):
    for _ in range(50):
        labels, intens, cand = random_state(rng)
        twin = labels.copy()
        args = (float(rng.random()), float(rng.random()), 1.0, 1.0, float(rng.random() * 0.4))
        f_pure = _purecv.expand_pass(labels, intens, cand, *args)
        f_fast = fast.expand_pass(twin, intens, cand, *args)
        assert f_pure == f_fast
        assert np.array_equal(labels, twin)


def test_shrink_pass_bit_identical(rng):
    for _ in range(50):
        labels, intens, cand = random_state(rng)
        twin = labels.copy()
        args = (float(rng.random()), float(rng.random()), 1.0, 1.0, float(rng.random() * 0.4))
        f_pure = _purecv.shrink_pass(labels, intens, cand, *args)
        f_fast = fast.shrink_pass(twin, intens, cand, *args)
        assert f_pure == f_fast
        assert np.array_equal(labels, twin)


def test_full_segmentation_identical_across_backends(rng, monkeypatch):
    """Same image through chan_vese_segment with each backend."""
    from lesionkit import segmentation
    from lesionkit.imaging import FloatPlane, gaussian_filter

    yy, xx = np.mgrid[0:80, 0:80]
    plane = np.where((yy - 40) ** 2 + (xx - 40) ** 2 < 15 ** 2, 50.0, 200.0)
    plane = gaussian_filter(FloatPlane(plane + rng.normal(0, 20, (80, 80))), 5, 1.0)

    masks = {}
    for name, backend in (("pure", _purecv), ("fast", fast)):
        monkeypatch.setattr(segmentation, "expand_pass", backend.expand_pass)
        monkeypatch.setattr(segmentation, "shrink_pass", backend.shrink_pass)
        result = segmentation.chan_vese_segment(plane)
        masks[name] = result.mask.bits
        assert result.converged
    assert np.array_equal(masks["pure"], masks["fast"])
