"""Black-box saliency by randomized occlusion.

The input image is repeatedly multiplied by smooth random masks (a coarse
Bernoulli grid, bilinearly upsampled, cropped at a random sub-cell phase)
and classified; each pixel accumulates the target-class probability of
every run it survived, normalized by how often it survived::

    raw(p) = sum_i f_c(img * M_i) * M_i(p)  /  sum_i M_i(p)

The per-pixel mask-weight denominator (rather than the constant N * p_on)
removes mask-sampling noise from the estimate: a classifier that ignores
its input yields an exactly constant raw plane and therefore an all-zero
normalized map, instead of amplified sampling residue. Accumulation uses
two double-precision planes at image resolution and masks are generated
streaming, so memory stays flat in N. Results are deterministic for a
fixed seed. The normalized map is (raw - min) / (max - min), or all zeros
when the accumulator is flat.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ExplanationAbortedError, InvalidParameterError
from .imaging import (
    BinaryMask,
    FloatPlane,
    RasterImage,
    blend_overlay,
    colorize,
    encode_png,
    encode_png16,
)

DEFAULT_N_MASKS_API = 1000  # batch/API quality default
DEFAULT_N_MASKS_UI = 100  # interactive default


@dataclass
class RiseParams:
    n_masks: int = DEFAULT_N_MASKS_API
    grid_cells: int = 7
    p_on: float = 0.5
    target_class: int | None = None  # None: explain the top class
    seed: int = 42

    def validate(self):
        if self.n_masks < 1:
            raise InvalidParameterError("n_masks must be >= 1")
        if self.grid_cells < 2:
            raise InvalidParameterError("grid_cells must be >= 2")
        if not 0.0 < self.p_on < 1.0:
            raise InvalidParameterError("p_on must be in (0, 1)")


@dataclass
class SaliencyMap:
    values: FloatPlane  # normalized to [0, 1]
    raw_accumulator: FloatPlane
    params_used: RiseParams


def _bilinear_upsample(grid, out_h, out_w):
    sh, sw = grid.shape
    yy = (np.arange(out_h) + 0.5) * (sh / out_h) - 0.5
    xx = (np.arange(out_w) + 0.5) * (sw / out_w) - 0.5
    y0 = np.clip(np.floor(yy).astype(np.intp), 0, sh - 1)
    x0 = np.clip(np.floor(xx).astype(np.intp), 0, sw - 1)
    y1 = np.minimum(y0 + 1, sh - 1)
    x1 = np.minimum(x0 + 1, sw - 1)
    fy = np.clip(yy - y0, 0.0, 1.0)[:, None]
    fx = np.clip(xx - x0, 0.0, 1.0)[None, :]
    return (
        grid[np.ix_(y0, x0)] * (1 - fy) * (1 - fx)
        + grid[np.ix_(y0, x1)] * (1 - fy) * fx
        + grid[np.ix_(y1, x0)] * fy * (1 - fx)
        + grid[np.ix_(y1, x1)] * fy * fx
    )


def generate_masks(params: RiseParams, width, height):
    """Yield ``n_masks`` occlusion planes in [0, 1], shape (height, width).

    Each mask is an s*s Bernoulli(p_on) grid upsampled to one cell beyond
    the target size and cropped at a random integer phase inside that
    cell, giving random spatial frequency content and phase. The draw
    order (grid, then y offset, then x offset) is fixed so a seed pins the
    whole sequence.
    """
    params.validate()
    rng = np.random.default_rng(params.seed)
    s = params.grid_cells
    cell_w = -(-width // s)  # ceil
    cell_h = -(-height // s)
    for _ in range(params.n_masks):
        grid = (rng.random((s, s)) < params.p_on).astype(np.float64)
        up = _bilinear_upsample(grid, height + cell_h, width + cell_w)
        np.clip(up, 0.0, 1.0, out=up)  # interpolation can overshoot by 1 ulp
        dy = int(rng.integers(0, cell_h))
        dx = int(rng.integers(0, cell_w))
        yield up[dy:dy + height, dx:dx + width]


def apply_mask(img: RasterImage, mask_plane) -> RasterImage:
    """Multiply image samples by mask values (occlusion toward black)."""
    darkened = img.data.astype(np.float64) * mask_plane[:, :, None]
    return RasterImage(np.rint(darkened).astype(np.uint8))


def rise(img: RasterImage, classifier, params: RiseParams | None = None) -> SaliencyMap:
    """Accumulated per-pixel importance for ``classifier`` on ``img``.

    ``classifier`` is any callable mapping a RasterImage to a Prediction;
    failures abort the explanation with the cause attached.
    """
    params = params or RiseParams()
    params.validate()
    target = params.target_class
    if target is None:
        try:
            target = int(np.argmax(classifier(img).probs))
        except Exception as exc:
            raise ExplanationAbortedError(
                f"classifier failed on the unmasked image: {exc}", cause=exc
            ) from exc
        params = RiseParams(params.n_masks, params.grid_cells, params.p_on, target, params.seed)
    acc = np.zeros((img.height, img.width), dtype=np.float64)
    weight = np.zeros((img.height, img.width), dtype=np.float64)
    for mask_plane in generate_masks(params, img.width, img.height):
        masked = apply_mask(img, mask_plane)
        try:
            pred = classifier(masked)
        except Exception as exc:
            raise ExplanationAbortedError(
                f"classifier failed on a masked image: {exc}", cause=exc
            ) from exc
        acc += float(pred.probs[target]) * mask_plane
        weight += mask_plane
    raw = acc / np.maximum(weight, 1e-12)
    lo, hi = float(raw.min()), float(raw.max())
    # a spread below 1e-9 relative is summation rounding, not signal
    if hi - lo > 1e-9 * max(abs(hi), abs(lo), 1e-300):
        values = (raw - lo) / (hi - lo)
        np.clip(values, 0.0, 1.0, out=values)
    else:
        values = np.zeros_like(raw)
    return SaliencyMap(FloatPlane(values), FloatPlane(raw), params)


def render_explanation(img: RasterImage, saliency: SaliencyMap, opacity=0.5) -> RasterImage:
    """Translucent heatmap overlay of the normalized saliency."""
    return blend_overlay(img, colorize(saliency.values), opacity)


def saliency_artifacts(img: RasterImage, saliency: SaliencyMap, opacity=0.5):
    """Exportable bundle: 16-bit saliency PNG, colorized overlay PNG, and a
    JSON sidecar echoing the parameters and the raw accumulator range."""
    raw = saliency.raw_accumulator.values
    sidecar = {
        "n_masks": saliency.params_used.n_masks,
        "grid_cells": saliency.params_used.grid_cells,
        "p_on": saliency.params_used.p_on,
        "target_class": saliency.params_used.target_class,
        "seed": saliency.params_used.seed,
        "raw_min": float(raw.min()),
        "raw_max": float(raw.max()),
    }
    return {
        "saliency16.png": encode_png16(saliency.values),
        "heatmap.png": encode_png(render_explanation(img, saliency, opacity)),
        "params.json": json.dumps(sidecar, indent=2).encode(),
    }


def saliency_mask(saliency: SaliencyMap, threshold=0.5) -> BinaryMask:
    """Binary high-importance region (for overlay layer use)."""
    return BinaryMask(saliency.values.values >= threshold)
