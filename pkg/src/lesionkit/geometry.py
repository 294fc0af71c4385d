"""Planar geometry helpers for mask analysis: convex hull, minimum-area
enclosing rectangle, and boundary tracing."""
from __future__ import annotations

import math

import numpy as np

from .errors import NoLesionError


def convex_hull(points):
    """Andrew monotone-chain hull, counter-clockwise, degenerates allowed.

    ``points`` is an (N, 2) array of (x, y); collinear interior points are
    dropped. Returns an (M, 2) float array (M may be 1 or 2 for point/
    segment inputs).
    """
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def min_area_rect(points):
    """Smallest-area enclosing rectangle of a point set.

    One side of the optimum is collinear with a hull edge, so only hull
    edge directions are tested. Returns
    ``(center_xy, (major, minor), tilt_deg)`` where ``tilt_deg`` is the
    angle of the major side to the x-axis in (-90, 90].
    """
    hull = convex_hull(points)
    if len(hull) == 0:
        raise NoLesionError("no points")
    if len(hull) == 1:
        return (hull[0][0], hull[0][1]), (0.0, 0.0), 0.0
    edges = np.diff(np.vstack([hull, hull[:1]]), axis=0)
    angles = np.unique(np.mod(np.arctan2(edges[:, 1], edges[:, 0]), math.pi / 2))

    best = None
    for ang in angles:
        c, s = math.cos(ang), math.sin(ang)
        rot = np.array([[c, s], [-s, c]])  # rotate by -ang
        proj = hull @ rot.T
        mins = proj.min(axis=0)
        maxs = proj.max(axis=0)
        size = maxs - mins
        area = size[0] * size[1]
        if best is None or area < best[0]:
            best = (area, ang, mins, maxs, rot)

    _, ang, mins, maxs, rot = best
    center_rot = (mins + maxs) / 2.0
    center = rot.T @ center_rot
    w, h = maxs - mins
    if w >= h:
        major, minor, tilt = w, h, math.degrees(ang)
    else:
        major, minor, tilt = h, w, math.degrees(ang) + 90.0
    if tilt > 90.0:
        tilt -= 180.0
    elif tilt <= -90.0:
        tilt += 180.0
    return (float(center[0]), float(center[1])), (float(major), float(minor)), float(tilt)


_MOORE_NBRS = ((0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1))


def moore_trace(mask_bits):
    """8-connected outer-boundary trace of the component containing the
    topmost-leftmost foreground pixel. Returns an (N, 2) array of (y, x)."""
    bits = np.asarray(mask_bits, dtype=bool)
    if not bits.any():
        raise NoLesionError("mask is empty")
    pad = np.zeros((bits.shape[0] + 2, bits.shape[1] + 2), dtype=bool)
    pad[1:-1, 1:-1] = bits
    ys, xs = np.nonzero(pad)
    order = np.lexsort((xs, ys))
    start = (int(ys[order[0]]), int(xs[order[0]]))
    path = [start]
    cur = start
    backtrack = 0  # entered from the west
    limit = 4 * (len(ys) + 8)
    while True:
        for i in range(8):
            k = (backtrack + 1 + i) % 8
            dy, dx = _MOORE_NBRS[k]
            ny, nx = cur[0] + dy, cur[1] + dx
            if pad[ny, nx]:
                backtrack = (k + 4) % 8
                cur = (ny, nx)
                break
        else:
            break  # isolated pixel
        if cur == start:
            break
        path.append(cur)
        if len(path) > limit:
            raise RuntimeError("boundary trace did not close")
    return np.array(path, dtype=np.float64) - 1.0  # undo padding offset


def cornercut_perimeter(path):
    """Length of the midpoint-smoothed closed polygon through ``path``.

    Connecting consecutive edge midpoints removes the stairstep bias of
    raw unit/diagonal chain steps; the length is sum |v_{i+2} - v_i| / 2.
    """
    n = len(path)
    if n < 3:
        if n < 2:
            return 0.0
        return 2.0 * float(np.hypot(*(path[1] - path[0])))
    nxt2 = np.roll(path, -2, axis=0)
    return float(0.5 * np.hypot(nxt2[:, 0] - path[:, 0], nxt2[:, 1] - path[:, 1]).sum())
