"""Image buffers, color conversions, filtering, mask algebra, and rendering.

Buffers are thin wrappers around numpy arrays:

* :class:`RasterImage` - 8-bit, row-major, channel-interleaved (H, W, C)
* :class:`BinaryMask`  - boolean (H, W)
* :class:`FloatPlane`  - float64 (H, W), finite values only

Conversion constants
--------------------
Luma/chroma conversion uses the BT.601 matrix::

    Y' = 0.299 R' + 0.587 G' + 0.114 B'          (R', G', B' in [0, 1])
    U  = 0.492099 (B' - Y')
    V  = 0.877318 (R' - Y')

Heatmap ramp
------------
``colorize`` uses a fixed 256-entry blue->green->red lookup table. Entry
``i`` encodes ``t = i / 255``::

    t <  0.5:  (0,              round(2t * 255),       round((1 - 2t) * 255))
    t >= 0.5:  (round((2t-1) * 255), round((2 - 2t) * 255), 0)

so index 0 is pure blue (0, 0, 255), index 255 pure red (255, 0, 0) and a
value of 0.5 maps to index 128 = (1, 254, 0). A saliency value v selects
entry ``rint(v * 255)``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import InvalidInputError, InvalidParameterError

# BT.601 luma weights and the derived chroma scale factors (six decimals).
BT601_KR = 0.299
BT601_KG = 0.587
BT601_KB = 0.114
BT601_U_SCALE = 0.492099  # = 0.436 / (1 - KB)
BT601_V_SCALE = 0.877318  # = 0.615 / (1 - KR)


@dataclass
class RasterImage:
    """8-bit image, shape (height, width, channels), channels 1 or 3."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if self.data.ndim == 2:
            self.data = self.data[:, :, None]
        if self.data.ndim != 3 or self.data.shape[2] not in (1, 3):
            raise InvalidInputError(
                f"image must be (H, W, 1|3), got shape {self.data.shape}"
            )
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise InvalidInputError("image dimensions must be >= 1")

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def channels(self):
        return self.data.shape[2]


@dataclass
class BinaryMask:
    """Per-pixel boolean lesion/feature mask, shape (height, width)."""

    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.ascontiguousarray(self.bits, dtype=bool)
        if self.bits.ndim != 2:
            raise InvalidInputError(f"mask must be 2-D, got shape {self.bits.shape}")
        if self.bits.shape[0] < 1 or self.bits.shape[1] < 1:
            raise InvalidInputError("mask dimensions must be >= 1")

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def width(self):
        return self.bits.shape[1]

    def area(self):
        return int(self.bits.sum())


@dataclass
class FloatPlane:
    """Single-channel real-valued plane; NaN/Inf are rejected."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise InvalidInputError(f"plane must be 2-D, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidInputError("plane contains non-finite values")

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]


def rgb_to_yuv(img: RasterImage):
    """Convert a 3-channel image to (Y', U, V) planes per BT.601.

    Y' is in [0, 1]; U and V are centered at 0.
    """
    if img.channels != 3:
        raise InvalidInputError(f"expected 3 channels, got {img.channels}")
    rgb = img.data.astype(np.float64) / 255.0
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    y = BT601_KR * r + BT601_KG * g + BT601_KB * b
    u = BT601_U_SCALE * (b - y)
    v = BT601_V_SCALE * (r - y)
    return FloatPlane(y), FloatPlane(u), FloatPlane(v)


def rgb_to_hsv(img: RasterImage):
    """Convert a 3-channel image to hexcone (H, S, V) planes.

    H in [0, 360) with achromatic pixels fixed to H = 0; S, V in [0, 1].
    """
    if img.channels != 3:
        raise InvalidInputError(f"expected 3 channels, got {img.channels}")
    rgb = img.data.astype(np.float64) / 255.0
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    cmax = np.max(rgb, axis=2)
    cmin = np.min(rgb, axis=2)
    delta = cmax - cmin
    chromatic = delta > 0

    h = np.zeros_like(cmax)
    safe = np.where(chromatic, delta, 1.0)
    r_is_max = chromatic & (cmax == r)
    g_is_max = chromatic & ~r_is_max & (cmax == g)
    b_is_max = chromatic & ~r_is_max & ~g_is_max
    h = np.where(r_is_max, ((g - b) / safe) % 6.0, h)
    h = np.where(g_is_max, (b - r) / safe + 2.0, h)
    h = np.where(b_is_max, (r - g) / safe + 4.0, h)
    h = (h * 60.0) % 360.0

    s = np.where(cmax > 0, delta / np.where(cmax > 0, cmax, 1.0), 0.0)
    return FloatPlane(h), FloatPlane(s), FloatPlane(cmax)


def _mirror_indices(n, pad):
    """Index vector of length n + 2*pad reflecting about the edge pixels.

    Works for any pad (the reflection is a triangular wave), so tiny
    planes are handled too.
    """
    idx = np.arange(-pad, n + pad)
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * n - 2
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx)


def gaussian_kernel_1d(kernel_size, sigma):
    """Normalized sampled Gaussian; building block of ``gaussian_filter``."""
    if kernel_size < 1 or kernel_size % 2 == 0:
        raise InvalidParameterError(f"kernel_size must be odd and >= 1, got {kernel_size}")
    if sigma <= 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    half = kernel_size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_filter(plane: FloatPlane, kernel_size=5, sigma=1.0):
    """2-D Gaussian smoothing (separable), borders mirror-padded."""
    k = gaussian_kernel_1d(kernel_size, sigma)
    half = kernel_size // 2
    vals = plane.values
    h, w = vals.shape
    padded = vals[_mirror_indices(h, half)][:, _mirror_indices(w, half)]
    tmp = np.zeros((h, w + 2 * half))
    for i, wt in enumerate(k):
        tmp += wt * padded[i:i + h, :]
    out = np.zeros((h, w))
    for j, wt in enumerate(k):
        out += wt * tmp[:, j:j + w]
    return FloatPlane(out)


def blend_overlay(base: RasterImage, overlay: RasterImage, opacity):
    """Alpha-blend ``overlay`` onto ``base``: (1-opacity)*base + opacity*overlay.

    A 1-channel overlay is broadcast over a 3-channel base. Output samples
    are rounded to the nearest 8-bit value.
    """
    if not 0.0 <= opacity <= 1.0:
        raise InvalidParameterError(f"opacity must be in [0, 1], got {opacity}")
    if (base.height, base.width) != (overlay.height, overlay.width):
        raise InvalidInputError(
            f"dimension mismatch: base {base.width}x{base.height}, "
            f"overlay {overlay.width}x{overlay.height}"
        )
    ov = overlay.data.astype(np.float64)
    if overlay.channels == 1 and base.channels == 3:
        ov = np.repeat(ov, 3, axis=2)
    elif overlay.channels != base.channels:
        raise InvalidInputError("channel mismatch between base and overlay")
    mixed = (1.0 - opacity) * base.data.astype(np.float64) + opacity * ov
    return RasterImage(np.rint(mixed).astype(np.uint8))


def _build_heat_lut():
    lut = np.zeros((256, 3), dtype=np.uint8)
    for i in range(256):
        t = i / 255.0
        if t < 0.5:
            lut[i] = (0, round(2 * t * 255), round((1 - 2 * t) * 255))
        else:
            lut[i] = (round((2 * t - 1) * 255), round((2 - 2 * t) * 255), 0)
    return lut


HEAT_LUT = _build_heat_lut()


def colorize(saliency: FloatPlane):
    """Map a [0, 1] plane through the blue->green->red heat LUT."""
    vals = saliency.values
    if vals.min() < 0.0 or vals.max() > 1.0:
        raise InvalidInputError(
            f"saliency values must be in [0, 1], got [{vals.min()}, {vals.max()}]"
        )
    idx = np.rint(vals * 255.0).astype(np.intp)
    return RasterImage(HEAT_LUT[idx])


def _nearest_indices(src_n, dst_n):
    # pixel-center mapping: dst i samples src floor((i + 0.5) * src/dst)
    return np.minimum(
        ((np.arange(dst_n) + 0.5) * (src_n / dst_n)).astype(np.intp), src_n - 1
    )


def resample_mask(mask: BinaryMask, new_w, new_h):
    """Nearest-neighbor rescale; the result is strictly binary."""
    if new_w < 1 or new_h < 1:
        raise InvalidParameterError("target dimensions must be >= 1")
    ys = _nearest_indices(mask.height, new_h)
    xs = _nearest_indices(mask.width, new_w)
    return BinaryMask(mask.bits[np.ix_(ys, xs)])


def resize_plane(plane: FloatPlane, new_w, new_h):
    """Bilinear rescale with pixel-center alignment and edge clamping."""
    if new_w < 1 or new_h < 1:
        raise InvalidParameterError("target dimensions must be >= 1")
    src = plane.values
    sh, sw = src.shape
    yy = (np.arange(new_h) + 0.5) * (sh / new_h) - 0.5
    xx = (np.arange(new_w) + 0.5) * (sw / new_w) - 0.5
    y0 = np.clip(np.floor(yy).astype(np.intp), 0, sh - 1)
    x0 = np.clip(np.floor(xx).astype(np.intp), 0, sw - 1)
    y1 = np.minimum(y0 + 1, sh - 1)
    x1 = np.minimum(x0 + 1, sw - 1)
    fy = np.clip(yy - y0, 0.0, 1.0)[:, None]
    fx = np.clip(xx - x0, 0.0, 1.0)[None, :]
    a = src[np.ix_(y0, x0)]
    b = src[np.ix_(y0, x1)]
    c = src[np.ix_(y1, x0)]
    d = src[np.ix_(y1, x1)]
    out = a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx
    return FloatPlane(out)


def resize_image(img: RasterImage, new_w, new_h):
    """Bilinear rescale of an 8-bit image (per channel)."""
    planes = [
        resize_plane(FloatPlane(img.data[:, :, c].astype(np.float64)), new_w, new_h).values
        for c in range(img.channels)
    ]
    return RasterImage(np.rint(np.stack(planes, axis=2)).astype(np.uint8))


# --- encoding / decoding -------------------------------------------------

def decode_image(data: bytes) -> RasterImage:
    """Decode JPEG or PNG bytes into a 3-channel image.

    Alpha channels are rejected; grayscale inputs are expanded to 3
    channels so the analysis pipeline sees a uniform format.
    """
    try:
        pil = Image.open(io.BytesIO(data))
        pil.load()
    except Exception as exc:
        raise InvalidInputError(f"cannot decode image: {exc}") from exc
    if pil.format not in ("JPEG", "PNG"):
        raise InvalidInputError(f"unsupported format {pil.format!r}; need JPEG or PNG")
    if pil.mode in ("RGBA", "LA", "PA") or (
        pil.mode == "P" and "transparency" in pil.info
    ):
        raise InvalidInputError("alpha channel not supported")
    rgb = pil.convert("RGB")
    return RasterImage(np.asarray(rgb, dtype=np.uint8))


def load_image(path) -> RasterImage:
    with open(path, "rb") as fh:
        return decode_image(fh.read())


def encode_png(img: RasterImage) -> bytes:
    arr = img.data[:, :, 0] if img.channels == 1 else img.data
    pil = Image.fromarray(arr, mode="L" if img.channels == 1 else "RGB")
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()


def encode_mask_png(mask: BinaryMask) -> bytes:
    """Serialize a mask as 1-channel PNG: background 0, foreground 255."""
    return encode_png(RasterImage(mask.bits.astype(np.uint8) * 255))


def decode_mask_png(data: bytes) -> BinaryMask:
    pil = Image.open(io.BytesIO(data))
    arr = np.asarray(pil.convert("L"), dtype=np.uint8)
    return BinaryMask(arr >= 128)


def encode_png16(plane: FloatPlane) -> bytes:
    """Serialize a [0, 1] plane as a 16-bit grayscale PNG."""
    vals = plane.values
    if vals.min() < 0.0 or vals.max() > 1.0:
        raise InvalidInputError("plane must be normalized to [0, 1] for 16-bit export")
    arr = np.rint(vals * 65535.0).astype(np.uint16)
    pil = Image.fromarray(arr)  # uint16 -> mode I;16
    buf = io.BytesIO()
    pil.save(buf, format="PNG")
    return buf.getvalue()
