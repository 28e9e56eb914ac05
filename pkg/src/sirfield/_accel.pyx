# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Same contracts as sirfield._kernels (the numpy reference backend):
zero-extended node data, fractional index coordinates, queries more
than one cell outside the node range evaluate to exactly zero.
"""

import numpy as np

from libc.math cimport fabs, floor


def correlate_valid(double[:, ::1] padded, double[:, ::1] kern):
    """Valid-mode 2-D cross-correlation of ``padded`` with ``kern``."""
    cdef Py_ssize_t n1 = padded.shape[0], n2 = padded.shape[1]
    cdef Py_ssize_t k1 = kern.shape[0], k2 = kern.shape[1]
    cdef Py_ssize_t o1 = n1 - k1 + 1, o2 = n2 - k2 + 1
    out = np.empty((o1, o2), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j, a, b
    cdef double acc
    for i in range(o1):
        for j in range(o2):
            acc = 0.0
            for a in range(k1):
                for b in range(k2):
                    acc += kern[a, b] * padded[i + a, j + b]
            o[i, j] = acc
    return out


cdef inline double _fetch(double[:, ::1] V, Py_ssize_t i, Py_ssize_t j,
                          Py_ssize_t p1, Py_ssize_t p2) noexcept nogil:
    if i < 0 or i >= p1 or j < 0 or j >= p2:
        return 0.0
    return V[i, j]


def bilinear_many(double[:, ::1] values, double[::1] u, double[::1] v):
    """Bilinear samples of a zero-extended node array at fractional indices."""
    cdef Py_ssize_t p1 = values.shape[0], p2 = values.shape[1]
    cdef Py_ssize_t n = u.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t q, i0, j0
    cdef double x, y, fu, fv
    for q in range(n):
        x = u[q]
        y = v[q]
        if not (x > -1.0 and x < p1 and y > -1.0 and y < p2):
            continue
        i0 = <Py_ssize_t> floor(x)
        j0 = <Py_ssize_t> floor(y)
        fu = x - i0
        fv = y - j0
        o[q] = (
            (1.0 - fu) * (1.0 - fv) * _fetch(values, i0, j0, p1, p2)
            + (1.0 - fu) * fv * _fetch(values, i0, j0 + 1, p1, p2)
            + fu * (1.0 - fv) * _fetch(values, i0 + 1, j0, p1, p2)
            + fu * fv * _fetch(values, i0 + 1, j0 + 1, p1, p2)
        )
    return out


cdef inline double _slope1(double s0, double s1, double s2, double s3) noexcept nogil:
    # Modified-Akima weighted slope with monotone limiting; see the
    # numpy backend for the full description.
    cdef double w1 = fabs(s3 - s2) + 0.5 * fabs(s3 + s2)
    cdef double w2 = fabs(s1 - s0) + 0.5 * fabs(s1 + s0)
    cdef double den = w1 + w2
    cdef double m, cap
    if den <= 0.0:
        return 0.0
    m = (w1 * s1 + w2 * s2) / den
    if s1 * s2 <= 0.0:
        return 0.0
    cap = 3.0 * (fabs(s1) if fabs(s1) < fabs(s2) else fabs(s2))
    if m > cap:
        return cap
    if m < -cap:
        return -cap
    return m


cdef inline double _herm(double y0, double y1, double m0, double m1, double t) noexcept nogil:
    cdef double t2 = t * t
    cdef double t3 = t2 * t
    return ((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (3.0 * t2 - 2.0 * t3) * y1
            + (t3 - t2) * m1)


def makima_many(double[:, ::1] values, double[::1] u, double[::1] v):
    """Monotone-cubic samples of a zero-extended node array."""
    cdef Py_ssize_t p1 = values.shape[0], p2 = values.shape[1]
    cdef Py_ssize_t n = u.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t q, ix, jy, a, b
    cdef double x, y, tx, ty
    cdef double w[6][6]
    cdef double s[5]
    cdef double qrow[6]
    cdef double m2, m3
    for q in range(n):
        x = u[q]
        y = v[q]
        if not (x > -1.0 and x < p1 and y > -1.0 and y < p2):
            continue
        ix = <Py_ssize_t> floor(x)
        jy = <Py_ssize_t> floor(y)
        tx = x - ix
        ty = y - jy
        for a in range(6):
            for b in range(6):
                w[a][b] = _fetch(values, ix - 2 + a, jy - 2 + b, p1, p2)
        # x pass: interpolate each of the 6 node rows at tx
        for b in range(6):
            for a in range(5):
                s[a] = w[a + 1][b] - w[a][b]
            m2 = _slope1(s[0], s[1], s[2], s[3])
            m3 = _slope1(s[1], s[2], s[3], s[4])
            qrow[b] = _herm(w[2][b], w[3][b], m2, m3, tx)
        # y pass on the intermediate row
        for a in range(5):
            s[a] = qrow[a + 1] - qrow[a]
        m2 = _slope1(s[0], s[1], s[2], s[3])
        m3 = _slope1(s[1], s[2], s[3], s[4])
        o[q] = _herm(qrow[2], qrow[3], m2, m3, ty)
    return out
