import numpy as np
import pytest

from lesionkit.imaging import BinaryMask, RasterImage


def disk_bits(size, radius, cx=None, cy=None):
    cx = size / 2 if cx is None else cx
    cy = size / 2 if cy is None else cy
    yy, xx = np.mgrid[0:size, 0:size]
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2


def lesion_image(bits, fg=60.0, bg=180.0, noise=0.0, seed=7, color_fg=None, color_bg=None):
    """Synthetic dermoscopy-style image: dark lesion on bright skin."""
    rng = np.random.default_rng(seed)
    h, w = bits.shape
    if color_fg is None:
        color_fg = (fg, fg, fg)
    if color_bg is None:
        color_bg = (bg, bg, bg)
    img = np.where(bits[:, :, None], np.array(color_fg), np.array(color_bg)).astype(np.float64)
    if noise:
        img += rng.normal(0.0, noise, (h, w, 1))
    return RasterImage(np.clip(img, 0, 255).astype(np.uint8))


def star_bits(size, r_base, r_amp, points=5):
    yy, xx = np.mgrid[0:size, 0:size]
    ang = np.arctan2(yy - size / 2, xx - size / 2)
    rad = np.hypot(yy - size / 2, xx - size / 2)
    return rad <= r_base + r_amp * np.cos(points * ang)


@pytest.fixture
def disk_mask_100():
    return BinaryMask(disk_bits(100, 20))


@pytest.fixture
def disk_image_100():
    return lesion_image(disk_bits(100, 20), noise=20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
