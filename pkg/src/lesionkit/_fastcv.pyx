# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled contour-evolution kernel.

Mirror of :mod:`lesionkit._purecv`: same scan order, same flip rule, same
float expression shapes, so both backends produce bit-identical masks.
"""

BACKEND = "cython"


def expand_pass(unsigned char[:, ::1] labels, double[:, ::1] intens,
                long long[::1] cand, double c1, double c2,
                double lam1, double lam2, double mu):
    cdef Py_ssize_t h = labels.shape[0]
    cdef Py_ssize_t w = labels.shape[1]
    cdef Py_ssize_t n = cand.shape[0]
    cdef Py_ssize_t j, y, x
    cdef long long i
    cdef int nv, k, flips = 0
    cdef double v, d_e
    with nogil:
        for j in range(n):
            i = cand[j]
            y = <Py_ssize_t>(i // w)
            x = <Py_ssize_t>(i % w)
            nv = 0
            k = 0
            if y > 0:
                nv += 1
                k += labels[y - 1, x]
            if y < h - 1:
                nv += 1
                k += labels[y + 1, x]
            if x > 0:
                nv += 1
                k += labels[y, x - 1]
            if x < w - 1:
                nv += 1
                k += labels[y, x + 1]
            v = intens[y, x]
            d_e = lam1 * (v - c1) * (v - c1) - lam2 * (v - c2) * (v - c2) + mu * (nv - 2 * k)
            if d_e < 0.0:
                labels[y, x] = 1
                flips += 1
    return flips


def shrink_pass(unsigned char[:, ::1] labels, double[:, ::1] intens,
                long long[::1] cand, double c1, double c2,
                double lam1, double lam2, double mu):
    cdef Py_ssize_t h = labels.shape[0]
    cdef Py_ssize_t w = labels.shape[1]
    cdef Py_ssize_t n = cand.shape[0]
    cdef Py_ssize_t j, y, x
    cdef long long i
    cdef int nv, k, m, flips = 0
    cdef double v, d_e
    with nogil:
        for j in range(n):
            i = cand[j]
            y = <Py_ssize_t>(i // w)
            x = <Py_ssize_t>(i % w)
            nv = 0
            k = 0
            if y > 0:
                nv += 1
                k += labels[y - 1, x]
            if y < h - 1:
                nv += 1
                k += labels[y + 1, x]
            if x > 0:
                nv += 1
                k += labels[y, x - 1]
            if x < w - 1:
                nv += 1
                k += labels[y, x + 1]
            m = nv - k
            v = intens[y, x]
            d_e = lam2 * (v - c2) * (v - c2) - lam1 * (v - c1) * (v - c1) + mu * (nv - 2 * m)
            if d_e < 0.0:
                labels[y, x] = 0
                flips += 1
    return flips
