"""Pure-Python (numpy) implementations of the hot kernels.

These mirror ``_ckernels.pyx`` one for one and are used when the compiled
module is missing or ``LTLAB_PURE_PYTHON=1`` is set.  The Sturm recurrence
is inherently sequential in the matrix index, so it is vectorised across
shifts instead.
"""
import numpy as np

_TINY = np.finfo(float).tiny
_SECTIONS = 63


def pivot_floor(off2):
    """Smallest admissible |pivot| in the Sturm recurrence."""
    m = float(np.max(off2)) if len(off2) else 0.0
    return _TINY * max(1.0, m) * 4.0


def sturm_count(diag, off2, x):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``.

    ``diag`` holds the n diagonal entries and ``off2`` the n-1 squared
    off-diagonal entries.
    """
    return int(sturm_counts(diag, off2, np.array([x], dtype=float))[0])


def sturm_counts(diag, off2, xs):
    diag = np.asarray(diag, dtype=float)
    off2 = np.asarray(off2, dtype=float)
    xs = np.asarray(xs, dtype=float)
    pivmin = pivot_floor(off2)
    count = np.zeros(xs.shape, dtype=np.int64)
    q = diag[0] - xs
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count += q < 0
    for i in range(1, diag.shape[0]):
        q = (diag[i] - xs) - off2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def bisect_eigenvalues(diag, off2, k_first, k_last, lower, upper, rtol=4e-16, atol=1e-300):
    """Eigenvalues with 0-based indices ``k_first..k_last-1`` by Sturm bisection.

    ``[lower, upper]`` must bracket every requested eigenvalue.  Each pass
    over the matrix evaluates ``_SECTIONS`` shifts per bracket (multisection),
    which amortizes the Python loop over the matrix index.
    """
    k = np.arange(k_first, k_last, dtype=np.int64)
    lo = np.full(k.shape, float(lower))
    hi = np.full(k.shape, float(upper))
    if k.size == 0:
        return lo
    frac = np.arange(1, _SECTIONS + 1) / (_SECTIONS + 1)
    for _ in range(200):
        width = hi - lo
        tol = np.maximum(atol, rtol * np.maximum(np.abs(lo), np.abs(hi)))
        mid = 0.5 * (lo + hi)
        active = (width > tol) & (mid > lo) & (mid < hi)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        pts = lo[idx, None] + width[idx, None] * frac[None, :]
        pts = np.minimum(np.maximum(pts, lo[idx, None]), hi[idx, None])
        c = sturm_counts(diag, off2, pts.ravel()).reshape(pts.shape)
        above = c > k[idx, None]
        # counts are monotone in the shift, so the first point above k bounds from the right
        first = np.where(above.any(axis=1), above.argmax(axis=1), _SECTIONS)
        rows = np.arange(idx.size)
        has_lo = first > 0
        lo[idx[has_lo]] = pts[rows[has_lo], first[has_lo] - 1]
        has_hi = first < _SECTIONS
        hi[idx[has_hi]] = pts[rows[has_hi], first[has_hi]]
    return 0.5 * (lo + hi)


def pair_exclusion(points, cells, s, bound):
    """Return ``(lhs, rhs, slack)`` for the pair-interaction exclusion bound.

    lhs sums |x_i - x_j|^(-2s) over all pairs; rhs adds ``bound`` for every
    pair sharing a cell.  slack is accumulated pair by pair so that it stays
    nonnegative term-wise.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    cells = np.asarray(cells, dtype=np.int64)
    i, j = np.triu_indices(points.shape[0], k=1)
    r2 = np.sum((points[i] - points[j]) ** 2, axis=1)
    with np.errstate(divide="ignore"):
        t = r2 ** (-s)
    same = cells[i] == cells[j]
    lhs = float(np.sum(t))
    rhs = float(bound) * int(np.count_nonzero(same))
    slack = float(np.sum(np.where(same, t - bound, t)))
    return lhs, rhs, slack
