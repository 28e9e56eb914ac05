"""Numpy implementations of the hot evaluation kernels.

:mod:`sirfield.backend` binds these names, or the compiled equivalents
from ``sirfield._accel`` when that extension is available.  Both
backends implement the same zero-extension convention: node data is
conceptually continued by zeros outside the stored array, and queries
more than one cell beyond the stored index range evaluate to exactly
zero.

Coordinates are fractional *index* coordinates: ``u`` runs along axis 0
of ``values`` and ``v`` along axis 1, with the stored nodes at the
integers ``0 .. p-1``.
"""

import numpy as np

_CHUNK = 1 << 16


def correlate_valid(padded, kern):
    """Valid-mode 2-D cross-correlation of ``padded`` with ``kern``."""
    windows = np.lib.stride_tricks.sliding_window_view(padded, kern.shape)
    return np.einsum("ijab,ab->ij", windows, kern, optimize=False)


def bilinear_many(values, u, v):
    """Bilinear samples of a zero-extended node array.

    Parameters
    ----------
    values : (p1, p2) float array
        Node data.
    u, v : float arrays of equal shape
        Fractional index coordinates of the query points.

    Returns
    -------
    float array of the same shape as ``u``.
    """
    p1, p2 = values.shape
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros(u.shape, dtype=np.float64)
    live = (u > -1.0) & (u < p1) & (v > -1.0) & (v < p2)
    if not np.any(live):
        return out
    uu = u[live]
    vv = v[live]
    i0 = np.floor(uu).astype(np.int64)
    j0 = np.floor(vv).astype(np.int64)
    fu = uu - i0
    fv = vv - j0
    acc = np.zeros(uu.shape, dtype=np.float64)
    for di, wx in ((0, 1.0 - fu), (1, fu)):
        ii = i0 + di
        okx = (ii >= 0) & (ii < p1)
        ic = np.clip(ii, 0, p1 - 1)
        for dj, wy in ((0, 1.0 - fv), (1, fv)):
            jj = j0 + dj
            ok = okx & (jj >= 0) & (jj < p2)
            jc = np.clip(jj, 0, p2 - 1)
            acc += np.where(ok, values[ic, jc], 0.0) * (wx * wy)
    out[live] = acc
    return out


def _slopes(s0, s1, s2, s3):
    """Node slope from four consecutive secants.

    Weighted-average slope in the style of the modified Akima scheme,
    followed by monotone limiting: the slope is zeroed at local extrema
    (adjacent secants of opposing sign or vanishing) and capped at three
    times the smaller adjacent secant, which keeps every Hermite piece
    monotone between its endpoint values.
    """
    w1 = np.abs(s3 - s2) + 0.5 * np.abs(s3 + s2)
    w2 = np.abs(s1 - s0) + 0.5 * np.abs(s1 + s0)
    den = w1 + w2
    m = np.divide(w1 * s1 + w2 * s2, den, out=np.zeros_like(den), where=den > 0.0)
    m = np.where(s1 * s2 <= 0.0, 0.0, m)
    cap = 3.0 * np.minimum(np.abs(s1), np.abs(s2))
    return np.sign(m) * np.minimum(np.abs(m), cap)


def _hermite(y0, y1, m0, m1, t):
    t2 = t * t
    t3 = t2 * t
    return (
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * m0
        + (3.0 * t2 - 2.0 * t3) * y1
        + (t3 - t2) * m1
    )


def makima_many(values, u, v):
    """Monotone-cubic samples of a zero-extended node array.

    Tensor-product evaluation (x pass, then y pass) on the 6x6 node
    neighbourhood of each query point, with slopes from :func:`_slopes`.
    Shapes as in :func:`bilinear_many`.
    """
    p1, p2 = values.shape
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros(u.shape, dtype=np.float64)
    live = (u > -1.0) & (u < p1) & (v > -1.0) & (v < p2)
    if not np.any(live):
        return out
    uu = u[live]
    vv = v[live]
    padded = np.pad(values, 3)
    res = np.empty(uu.shape, dtype=np.float64)
    offs = np.arange(6)
    for lo in range(0, uu.size, _CHUNK):
        sl = slice(lo, min(lo + _CHUNK, uu.size))
        ix = np.floor(uu[sl]).astype(np.int64)
        jy = np.floor(vv[sl]).astype(np.int64)
        tx = (uu[sl] - ix)[:, None]
        ty = vv[sl] - jy
        # window of nodes ix-2 .. ix+3; the +3 pad makes every read valid
        w = padded[
            (ix + 1)[:, None, None] + offs[None, :, None],
            (jy + 1)[:, None, None] + offs[None, None, :],
        ]
        s = w[:, 1:, :] - w[:, :-1, :]
        m2 = _slopes(s[:, 0], s[:, 1], s[:, 2], s[:, 3])
        m3 = _slopes(s[:, 1], s[:, 2], s[:, 3], s[:, 4])
        q = _hermite(w[:, 2, :], w[:, 3, :], m2, m3, tx)
        sq = q[:, 1:] - q[:, :-1]
        n2 = _slopes(sq[:, 0], sq[:, 1], sq[:, 2], sq[:, 3])
        n3 = _slopes(sq[:, 1], sq[:, 2], sq[:, 3], sq[:, 4])
        res[sl] = _hermite(q[:, 2], q[:, 3], n2, n3, ty)
    out[live] = res
    return out
