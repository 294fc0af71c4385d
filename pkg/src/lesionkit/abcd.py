"""ABCD-rule descriptors for a segmented lesion.

Asymmetry is scored from eight parameters: two mirror-overlap percentages
(computed on the rotation-aligned mask) plus six distances between the
lesion centroid and the brightness-weighted centroid of each predefined
color class. Border irregularity is the isoperimetric ratio P^2/(4*pi*A),
1.0 for a perfect disk. Diameters come from the minimum-area enclosing
rectangle and a pixel-to-millimeter factor. Color variegation assigns
every lesion pixel to one of six clinically named colors via fixed HSV
boxes (below); pixels outside every box go to the nearest box center so
the color classes partition the lesion.

HSV boxes (H in degrees, S/V in [0, 1]; inclusive bounds, first match in
the order below wins):

    white        S in [0, 0.15],  V in [0.8, 1]
    red          H in [345, 15] (wrapping), S in [0.4, 1], V in [0.3, 1]
    light-brown  H in [15, 50],   S in [0.2, 0.6], V in [0.5, 0.9]
    dark-brown   H in [15, 50],   S in [0.3, 1],   V in [0.2, 0.5]
    blue-gray    H in [180, 260], S in [0.1, 0.5], V in [0.3, 0.8]
    black        V in [0, 0.2]

The boxes are heuristics published here precisely so they can be audited
and overridden; color classes smaller than ``min_area_fraction`` of the
lesion are discarded as speckle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NoLesionError
from .geometry import cornercut_perimeter, min_area_rect, moore_trace
from .imaging import BinaryMask, RasterImage, rgb_to_hsv

COLOR_NAMES = ("white", "red", "light-brown", "dark-brown", "blue-gray", "black")

# (h_lo, h_hi) or None for hue-free boxes; h_lo > h_hi wraps through 0.
HSV_BOXES = {
    "white": (None, (0.0, 0.15), (0.8, 1.0)),
    "red": ((345.0, 15.0), (0.4, 1.0), (0.3, 1.0)),
    "light-brown": ((15.0, 50.0), (0.2, 0.6), (0.5, 0.9)),
    "dark-brown": ((15.0, 50.0), (0.3, 1.0), (0.2, 0.5)),
    "blue-gray": ((180.0, 260.0), (0.1, 0.5), (0.3, 0.8)),
    "black": (None, (0.0, 1.0), (0.0, 0.2)),
}

# overlay marker colors, chosen for contrast against skin tones
MARKER_COLORS = {
    "white": (255, 128, 255),
    "red": (255, 0, 255),
    "light-brown": (255, 255, 0),
    "dark-brown": (255, 0, 0),
    "blue-gray": (0, 255, 255),
    "black": (0, 64, 255),
}

DEFAULT_MM_PER_PIXEL = 0.033
MIN_AREA_FRACTION = 0.02


@dataclass
class ColorRegion:
    """One detected color class: pixel area and V-weighted centroid (x, y)."""

    color: str
    area_px: int
    centroid: tuple


@dataclass
class AlignedLesion:
    """Lesion rotated so its minimum-area rectangle is axis-aligned."""

    mask: BinaryMask
    image: RasterImage
    tilt_angle: float
    rect_major: float
    rect_minor: float
    centroid: tuple


@dataclass
class AbcdFeatures:
    asym_vertical_pct: float
    asym_horizontal_pct: float
    centroid_distances: tuple  # six values, COLOR_NAMES order, 0 when absent
    irregularity_index: float
    diameter_h_mm: float
    diameter_v_mm: float
    colors_present: tuple
    color_regions: list
    rect_major_px: float
    rect_minor_px: float
    tilt_angle_deg: float


@dataclass
class DisplayScores:
    """ABCD readouts projected onto the [0, 10] display range.

    A1/A2 are the horizontal/vertical asymmetry percentages divided by 10;
    B is (irregularity - 1) * 5; D1/D2 are diameters in mm times 10/12 so
    the 6 mm clinical threshold lands at 5.0. All values are clamped.
    """

    A1: float
    A2: float
    B: float
    D1: float
    D2: float


def _boundary_pixel_corners(bits):
    """Corners of boundary pixels: hull input covering the pixel footprint."""
    eroded = np.zeros_like(bits)
    eroded[1:-1, 1:-1] = (
        bits[1:-1, 1:-1]
        & bits[:-2, 1:-1]
        & bits[2:, 1:-1]
        & bits[1:-1, :-2]
        & bits[1:-1, 2:]
    )
    ys, xs = np.nonzero(bits & ~eroded)
    corners = np.empty((4 * len(ys), 2), dtype=np.float64)
    for i, (dy, dx) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        corners[i::4, 0] = xs + dx
        corners[i::4, 1] = ys + dy
    return corners


def _rotate_about(img_arr, tilt_deg, center, nearest):
    """Rotate an array by -tilt about ``center`` (x, y) onto a canvas that
    holds the whole rotated frame. Nearest-neighbor or clamped bilinear."""
    h, w = img_arr.shape[:2]
    rad = math.radians(-tilt_deg)
    c, s = math.cos(rad), math.sin(rad)
    cx, cy = center
    corners = np.array([[0, 0], [w, 0], [0, h], [w, h]], dtype=np.float64)
    rot = np.array([[c, -s], [s, c]])
    moved = (corners - (cx, cy)) @ rot.T + (cx, cy)
    x_lo, y_lo = np.floor(moved.min(axis=0))
    x_hi, y_hi = np.ceil(moved.max(axis=0))
    out_w, out_h = int(x_hi - x_lo), int(y_hi - y_lo)

    # inverse map: output pixel centers back into source coordinates
    yy, xx = np.mgrid[0:out_h, 0:out_w].astype(np.float64)
    qx = xx + x_lo + 0.5 - cx
    qy = yy + y_lo + 0.5 - cy
    sx = c * qx + s * qy + cx - 0.5
    sy = -s * qx + c * qy + cy - 0.5

    if nearest:
        ix = np.rint(sx).astype(np.intp)
        iy = np.rint(sy).astype(np.intp)
        valid = (ix >= 0) & (ix < w) & (iy >= 0) & (iy < h)
        out = np.zeros((out_h, out_w), dtype=img_arr.dtype)
        out[valid] = img_arr[iy[valid], ix[valid]]
        return out
    x0 = np.clip(np.floor(sx).astype(np.intp), 0, w - 1)
    y0 = np.clip(np.floor(sy).astype(np.intp), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(sx - x0, 0.0, 1.0)
    fy = np.clip(sy - y0, 0.0, 1.0)
    arr = img_arr.astype(np.float64)
    mix = (
        arr[y0, x0] * (1 - fy) * (1 - fx)
        + arr[y0, x1] * (1 - fy) * fx
        + arr[y1, x0] * fy * (1 - fx)
        + arr[y1, x1] * fy * fx
    )
    return np.rint(mix).astype(img_arr.dtype)


def mask_centroid(bits):
    ys, xs = np.nonzero(bits)
    return float(xs.mean()), float(ys.mean())


ISOTROPY_RATIO = 0.98  # minor/major above this: orientation is ill-defined


def align(img: RasterImage, mask: BinaryMask) -> AlignedLesion:
    """Rotate image and mask so the lesion's minimum-area rectangle sits
    axis-aligned, major side horizontal.

    Near-isotropic lesions (minor/major > 0.98, e.g. disks) have no
    meaningful orientation: any rectangle angle is as good as any other,
    so no rotation is applied and the tilt is reported as 0. That keeps
    the resampling noise of a pointless rotation out of the mirror-overlap
    asymmetry scores.
    """
    if not mask.bits.any():
        raise NoLesionError("cannot align an empty mask")
    corners = _boundary_pixel_corners(mask.bits)
    center, (major, minor), tilt = min_area_rect(corners)
    if major <= 0 or minor / major > ISOTROPY_RATIO:
        tilt = 0.0
    if tilt == 0.0:
        rot_mask = mask.bits.copy()
        rot_img = img.data.copy()
    else:
        rot_mask = _rotate_about(mask.bits, tilt, center, nearest=True)
        rot_img = np.stack(
            [
                _rotate_about(img.data[:, :, ch], tilt, center, nearest=False)
                for ch in range(img.channels)
            ],
            axis=2,
        )
        if not rot_mask.any():  # sub-pixel lesion rotated off-grid; keep original
            rot_mask = mask.bits.copy()
            rot_img = img.data.copy()
    return AlignedLesion(
        mask=BinaryMask(rot_mask),
        image=RasterImage(rot_img),
        tilt_angle=tilt,
        rect_major=major,
        rect_minor=minor,
        centroid=mask_centroid(rot_mask),
    )


def _mirror_mismatch_pct(bits, axis):
    """XOR area between the mask and its mirror about the centroid line
    perpendicular to ``axis``, as a percentage of the lesion area."""
    coords = np.nonzero(bits)[axis]
    c = coords.mean()
    n = bits.shape[axis]
    flipped = np.flip(bits, axis=axis)
    shift = int(round(2.0 * c)) - (n - 1)
    mirrored = np.zeros_like(bits)
    if shift >= 0:
        src = flipped[: n - shift] if axis == 0 else flipped[:, : n - shift]
        if axis == 0:
            mirrored[shift:] = src
        else:
            mirrored[:, shift:] = src
    else:
        if axis == 0:
            mirrored[:shift] = flipped[-shift:]
        else:
            mirrored[:, :shift] = flipped[:, -shift:]
    return 100.0 * float((bits ^ mirrored).sum()) / float(bits.sum())


def asymmetry(lesion: AlignedLesion, regions, centroid=None):
    """Mirror-overlap percentages plus the six color-centroid distances.

    ``regions`` must carry centroids in the same coordinate frame as
    ``centroid`` (defaults to the aligned-lesion centroid); the distances
    themselves are rotation-invariant.
    """
    bits = lesion.mask.bits
    if not bits.any():
        raise NoLesionError("empty aligned mask")
    asym_v = _mirror_mismatch_pct(bits, axis=0)
    asym_h = _mirror_mismatch_pct(bits, axis=1)
    cx, cy = centroid if centroid is not None else lesion.centroid
    by_color = {r.color: r for r in regions}
    distances = tuple(
        math.hypot(by_color[name].centroid[0] - cx, by_color[name].centroid[1] - cy)
        if name in by_color
        else 0.0
        for name in COLOR_NAMES
    )
    return asym_v, asym_h, distances


def border_irregularity(mask: BinaryMask) -> float:
    """Isoperimetric deviation from a perfect circle, >= 1.

    Perimeter is the corner-cut length of the 8-connected boundary trace
    plus pi (the half-pixel offset between pixel centers and the region
    footprint); raw unit/sqrt(2) chain lengths overshoot circles by ~10%,
    which would put even a perfect disk near 1.1.
    """
    if not mask.bits.any():
        raise NoLesionError("empty mask has no border")
    path = moore_trace(mask.bits)
    perimeter = cornercut_perimeter(path) + math.pi
    area = float(mask.bits.sum())
    return max(1.0, perimeter * perimeter / (4.0 * math.pi * area))


def diameters(lesion: AlignedLesion, mm_per_pixel):
    """Major/minor rectangle sides converted to millimeters."""
    if mm_per_pixel <= 0:
        raise InvalidParameterError(f"mm_per_pixel must be > 0, got {mm_per_pixel}")
    return lesion.rect_major * mm_per_pixel, lesion.rect_minor * mm_per_pixel


def _box_masks(h, s, v):
    """Boolean membership of each (h, s, v) sample in each color box."""
    out = {}
    for name, (h_rng, s_rng, v_rng) in HSV_BOXES.items():
        ok = (s >= s_rng[0]) & (s <= s_rng[1]) & (v >= v_rng[0]) & (v <= v_rng[1])
        if h_rng is not None:
            h_lo, h_hi = h_rng
            if h_lo <= h_hi:
                ok &= (h >= h_lo) & (h <= h_hi)
            else:  # wrap through 0
                ok &= (h >= h_lo) | (h <= h_hi)
        out[name] = ok
    return out


def _box_centers():
    centers = []
    for name in COLOR_NAMES:
        h_rng, s_rng, v_rng = HSV_BOXES[name]
        if h_rng is None:
            hc = None
        elif h_rng[0] <= h_rng[1]:
            hc = (h_rng[0] + h_rng[1]) / 2.0
        else:
            hc = ((h_rng[0] + h_rng[1] + 360.0) / 2.0) % 360.0
        centers.append((hc, (s_rng[0] + s_rng[1]) / 2.0, (v_rng[0] + v_rng[1]) / 2.0))
    return centers


_BOX_CENTERS = _box_centers()


def classify_lesion_pixels(img: RasterImage, mask: BinaryMask):
    """Color-class index plane: -1 outside the lesion, else 0..5 per
    COLOR_NAMES. Pixels outside every box get the nearest box center
    (circular hue term scaled by 1/180, skipped for hue-free boxes)."""
    h_p, s_p, v_p = rgb_to_hsv(img)
    h, s, v = h_p.values, s_p.values, v_p.values
    labels = np.full(mask.bits.shape, -1, dtype=np.int8)
    unassigned = mask.bits.copy()
    boxes = _box_masks(h, s, v)
    for i, name in enumerate(COLOR_NAMES):
        hit = unassigned & boxes[name]
        labels[hit] = i
        unassigned &= ~hit
    if unassigned.any():
        ys, xs = np.nonzero(unassigned)
        hh, ss, vv = h[ys, xs], s[ys, xs], v[ys, xs]
        dist = np.empty((len(ys), len(COLOR_NAMES)))
        for i, (hc, sc, vc) in enumerate(_BOX_CENTERS):
            if hc is None:
                dh = 0.0
            else:
                raw = np.abs(hh - hc)
                dh = np.minimum(raw, 360.0 - raw) / 180.0
            dist[:, i] = dh * dh + (ss - sc) ** 2 + (vv - vc) ** 2
        labels[ys, xs] = np.argmin(dist, axis=1).astype(np.int8)
    return labels, v


def color_variegation(img: RasterImage, mask: BinaryMask, min_area_fraction=MIN_AREA_FRACTION):
    """Detect which of the six predefined colors the lesion contains.

    Returns one :class:`ColorRegion` per present color (COLOR_NAMES
    order) with its area and V-weighted centroid; classes smaller than
    ``min_area_fraction`` of the lesion are dropped.
    """
    if not mask.bits.any():
        raise NoLesionError("empty mask has no colors")
    labels, v = classify_lesion_pixels(img, mask)
    lesion_area = int(mask.bits.sum())
    min_area = min_area_fraction * lesion_area
    regions = []
    for i, name in enumerate(COLOR_NAMES):
        ys, xs = np.nonzero(labels == i)
        area = len(ys)
        if area == 0 or area < min_area:
            continue
        w = v[ys, xs]
        total = w.sum()
        if total > 0:
            cx = float((xs * w).sum() / total)
            cy = float((ys * w).sum() / total)
        else:  # pure black region: V weights vanish, fall back to unweighted
            cx, cy = float(xs.mean()), float(ys.mean())
        regions.append(ColorRegion(name, area, (cx, cy)))
    return regions


def project_scores(features: AbcdFeatures) -> DisplayScores:
    """Clamp the raw descriptors onto the [0, 10] display range."""

    def clamp(x):
        return min(10.0, max(0.0, x))

    return DisplayScores(
        A1=clamp(features.asym_horizontal_pct / 10.0),
        A2=clamp(features.asym_vertical_pct / 10.0),
        B=clamp((features.irregularity_index - 1.0) * 5.0),
        D1=clamp(features.diameter_h_mm * (10.0 / 12.0)),
        D2=clamp(features.diameter_v_mm * (10.0 / 12.0)),
    )


def extract_features(img: RasterImage, mask: BinaryMask,
                     mm_per_pixel=DEFAULT_MM_PER_PIXEL,
                     min_area_fraction=MIN_AREA_FRACTION) -> AbcdFeatures:
    """Full descriptor set for one lesion.

    The mask is expected to be a single filled component (the
    segmentation pipeline guarantees that); color regions and centroid
    distances are computed in the original frame, mirror overlaps on the
    aligned mask.
    """
    if not mask.bits.any():
        raise NoLesionError("empty lesion mask")
    lesion = align(img, mask)
    regions = color_variegation(img, mask, min_area_fraction)
    asym_v, asym_h, distances = asymmetry(lesion, regions, centroid=mask_centroid(mask.bits))
    irregularity = border_irregularity(mask)
    d_h, d_v = diameters(lesion, mm_per_pixel)
    return AbcdFeatures(
        asym_vertical_pct=asym_v,
        asym_horizontal_pct=asym_h,
        centroid_distances=distances,
        irregularity_index=irregularity,
        diameter_h_mm=d_h,
        diameter_v_mm=d_v,
        colors_present=tuple(r.color for r in regions),
        color_regions=regions,
        rect_major_px=lesion.rect_major,
        rect_minor_px=lesion.rect_minor,
        tilt_angle_deg=lesion.tilt_angle,
    )


# --- overlay rendering ----------------------------------------------------

def render_color_regions(img: RasterImage, mask: BinaryMask,
                         min_area_fraction=MIN_AREA_FRACTION) -> RasterImage:
    """Paint each detected color class with its marker color."""
    labels, _ = classify_lesion_pixels(img, mask)
    lesion_area = int(mask.bits.sum())
    out = img.data.copy()
    for i, name in enumerate(COLOR_NAMES):
        sel = labels == i
        if sel.sum() < min_area_fraction * lesion_area:
            continue
        out[sel] = MARKER_COLORS[name]
    return RasterImage(out)


def render_asymmetry_axes(img: RasterImage, mask: BinaryMask, thickness=1) -> RasterImage:
    """Draw the centroid mirror axes used by the asymmetry scores."""
    cx, cy = mask_centroid(mask.bits)
    out = img.data.copy()
    x = int(round(cx))
    y = int(round(cy))
    out[max(0, y - thickness):y + thickness + 1, :] = (0, 255, 255)
    out[:, max(0, x - thickness):x + thickness + 1] = (255, 255, 0)
    return RasterImage(out)
