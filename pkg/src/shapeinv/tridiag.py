"""Symmetric tridiagonal eigenvalues by Sturm-sequence multisection.

The count of eigenvalues below a shift is the number of negative pivots in
the LDL^T factorization of T - sigma I.  Counting is vectorized over many
shifts at once, so each sweep over the matrix narrows every wanted
eigenvalue's bracket by a factor ``sections + 1``.  Everything is plain
elementwise float arithmetic in a fixed order, hence bit-reproducible.
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


def gershgorin(d, e):
    d = np.asarray(d, dtype=float)
    r = np.zeros_like(d)
    if len(d) > 1:
        ae = np.abs(np.asarray(e, dtype=float))
        r[:-1] += ae
        r[1:] += ae
    return float(np.min(d - r)), float(np.max(d + r))


def sturm_count(d, e, shifts):
    """Number of eigenvalues strictly below each shift."""
    d = np.asarray(d, dtype=float)
    e2 = np.asarray(e, dtype=float) ** 2
    s = np.atleast_1d(np.asarray(shifts, dtype=float))
    # pivots smaller than this are nudged negative (LAPACK's pivmin idea)
    pivmin = _TINY * max(1.0, float(e2.max()) if len(e2) else 1.0) / _EPS
    count = np.zeros(s.shape, dtype=np.int64)
    q = d[0] - s
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count += q < 0
    for i in range(1, len(d)):
        q = (d[i] - s) - e2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def lowest_eigenvalues(d, e, n, sections=15, abs_tol=1e-13):
    """The ``n`` smallest eigenvalues of the tridiagonal (d, e), ascending."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    if len(e) != max(len(d) - 1, 0):
        raise ValueError("off-diagonal must have length len(d) - 1")
    if not 0 < n <= len(d):
        raise ValueError(f"cannot return {n} eigenvalues of a {len(d)}x{len(d)} matrix")
    lo, hi = gershgorin(d, e)
    pad = 2 * _EPS * max(abs(lo), abs(hi)) + abs_tol
    lo, hi = lo - pad, hi + pad
    # bracket j: count(left) <= j < count(right)
    left = np.full(n, lo)
    right = np.full(n, hi)
    idx = np.arange(n)
    frac = np.arange(1, sections + 1) / (sections + 1)
    while True:
        width = right - left
        tol = 2 * _EPS * np.maximum(np.abs(left), np.abs(right)) + abs_tol
        active = width > tol
        if not active.any():
            break
        a = np.flatnonzero(active)
        pts = left[a, None] + width[a, None] * frac[None, :]
        counts = sturm_count(d, e, pts.ravel()).reshape(pts.shape)
        j = idx[a, None]
        below = counts <= j  # point still left of eigenvalue j
        # new left: last point with count <= j; new right: first with count > j
        nl = np.where(below, pts, -np.inf).max(axis=1)
        nr = np.where(~below, pts, np.inf).min(axis=1)
        left[a] = np.maximum(left[a], nl)
        right[a] = np.minimum(right[a], nr)
    return 0.5 * (left + right)
