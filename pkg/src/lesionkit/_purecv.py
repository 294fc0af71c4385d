"""Pure-Python contour-evolution kernel.

Fallback for :mod:`lesionkit._fastcv`; the two implementations must stay
semantically identical (same scan order, same flip rule, same float
expression shapes) so that segmentation results do not depend on which
backend is loaded.
"""

BACKEND = "pure-python"


def expand_pass(labels, intens, cand, c1, c2, lam1, lam2, mu):
    """Flip outside->inside every candidate pixel whose flip lowers the energy.

    ``labels`` is a uint8 (H, W) array mutated in place, ``cand`` the flat
    indices of outside pixels that touched the contour when the sweep
    started, in scan order. Returns the number of flips.
    """
    h, w = labels.shape
    flips = 0
    for idx in cand:
        i = int(idx)
        y, x = i // w, i % w
        nv = 0
        k = 0
        if y > 0:
            nv += 1
            k += int(labels[y - 1, x])
        if y < h - 1:
            nv += 1
            k += int(labels[y + 1, x])
        if x > 0:
            nv += 1
            k += int(labels[y, x - 1])
        if x < w - 1:
            nv += 1
            k += int(labels[y, x + 1])
        v = float(intens[y, x])
        d_e = lam1 * (v - c1) * (v - c1) - lam2 * (v - c2) * (v - c2) + mu * (nv - 2 * k)
        if d_e < 0.0:
            labels[y, x] = 1
            flips += 1
    return flips


def shrink_pass(labels, intens, cand, c1, c2, lam1, lam2, mu):
    """Flip inside->outside every candidate pixel whose flip lowers the energy."""
    h, w = labels.shape
    flips = 0
    for idx in cand:
        i = int(idx)
        y, x = i // w, i % w
        nv = 0
        k = 0
        if y > 0:
            nv += 1
            k += int(labels[y - 1, x])
        if y < h - 1:
            nv += 1
            k += int(labels[y + 1, x])
        if x > 0:
            nv += 1
            k += int(labels[y, x - 1])
        if x < w - 1:
            nv += 1
            k += int(labels[y, x + 1])
        m = nv - k
        v = float(intens[y, x])
        d_e = lam2 * (v - c2) * (v - c2) - lam1 * (v - c1) * (v - c1) + mu * (nv - 2 * m)
        if d_e < 0.0:
            labels[y, x] = 0
            flips += 1
    return flips
