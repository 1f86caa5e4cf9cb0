"""Hot kernels: Jacobi recurrences evaluated at many points.

Every kernel has a loop form (compiled by numba when enabled) and a
vectorized numpy form with identical arithmetic order per point. The public
names at the bottom dispatch on ``_accel.USE_NUMBA``.

The Jacobi kernels work in homogeneous form: for a pair (d, s) they return
``s**n * P_n(d / s)``, built by the recurrence multiplied through by powers
of ``s``. With ``s = 1`` this is the ordinary table; with ``s = x + y`` and
``d = y - x`` it is the polynomial continuation needed at the triangle apex.
"""

from __future__ import annotations

import numpy as np

from . import _accel


def _recurrence_coeffs(k, a, b):
    ab = a + b
    c0 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0)
    c1 = (2.0 * k + ab - 1.0) * (a * a - b * b)
    c2 = (2.0 * k + ab - 1.0) * (2.0 * k + ab) * (2.0 * k + ab - 2.0)
    c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + ab)
    return c0, c1, c2, c3


# ---------------------------------------------------------------------------
# loop kernels (numba-compilable)


def _hjacobi_table_loops(nmax, a, b, d, s):
    npts = d.shape[0]
    out = np.empty((nmax + 1, npts))
    ab = a + b
    for p in range(npts):
        out[0, p] = 1.0
        if nmax >= 1:
            out[1, p] = 0.5 * ((a - b) * s[p] + (ab + 2.0) * d[p])
    for k in range(2, nmax + 1):
        c0 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0)
        c1 = (2.0 * k + ab - 1.0) * (a * a - b * b)
        c2 = (2.0 * k + ab - 1.0) * (2.0 * k + ab) * (2.0 * k + ab - 2.0)
        c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + ab)
        for p in range(npts):
            sp = s[p]
            out[k, p] = ((c2 * d[p] + c1 * sp) * out[k - 1, p] - c3 * sp * sp * out[k - 2, p]) / c0
    return out


def _poch_loop(a, n):
    acc = 1.0
    for i in range(n):
        acc *= a + i
    return acc


def _basis_table_loops(nmax, a, b, g, x, y):
    npts = x.shape[0]
    ntot = (nmax + 1) * (nmax + 2) // 2
    out = np.empty((ntot, npts))
    s = x + y
    d = y - x
    z = 1.0 - 2.0 * x - 2.0 * y
    ones = np.ones(npts)
    first = _hjacobi_table_loops(nmax, a, b, d, s)
    for k in range(nmax + 1):
        scale_k = 1.0 / _poch_loop(k + a + b + 1.0, k)
        big_a = 2.0 * k + a + b + 1.0
        second = _hjacobi_table_loops(nmax - k, big_a, g, z, ones)
        for j in range(nmax - k + 1):
            m = k + j
            scale = scale_k / _poch_loop(j + big_a + g + 1.0, j)
            row = m * (m + 1) // 2 + k
            for p in range(npts):
                out[row, p] = scale * first[k, p] * second[j, p]
    return out


# ---------------------------------------------------------------------------
# numpy kernels


def _hjacobi_table_numpy(nmax, a, b, d, s):
    d = np.asarray(d, dtype=float)
    s = np.asarray(s, dtype=float)
    out = np.empty((nmax + 1, d.shape[0]))
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 0.5 * ((a - b) * s + (a + b + 2.0) * d)
    for k in range(2, nmax + 1):
        c0, c1, c2, c3 = _recurrence_coeffs(k, a, b)
        out[k] = ((c2 * d + c1 * s) * out[k - 1] - c3 * s * s * out[k - 2]) / c0
    return out


def _basis_table_numpy(nmax, a, b, g, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ntot = (nmax + 1) * (nmax + 2) // 2
    out = np.empty((ntot, x.shape[0]))
    s = x + y
    d = y - x
    z = 1.0 - 2.0 * x - 2.0 * y
    ones = np.ones_like(x)
    first = _hjacobi_table_numpy(nmax, a, b, d, s)
    for k in range(nmax + 1):
        scale_k = 1.0 / _poch_loop(k + a + b + 1.0, k)
        big_a = 2.0 * k + a + b + 1.0
        second = _hjacobi_table_numpy(nmax - k, big_a, g, z, ones)
        for j in range(nmax - k + 1):
            m = k + j
            scale = scale_k / _poch_loop(j + big_a + g + 1.0, j)
            out[m * (m + 1) // 2 + k] = scale * first[k] * second[j]
    return out


# ---------------------------------------------------------------------------
# dispatch

if _accel.USE_NUMBA:
    # rebind module globals so the compiled basis kernel resolves compiled helpers
    _poch_loop = _accel.njit(_poch_loop)
    _hjacobi_table_loops = _accel.njit(_hjacobi_table_loops)
    _basis_table_loops = _accel.njit(_basis_table_loops)
    _hjacobi_table_jit = _hjacobi_table_loops
    _basis_table_jit = _basis_table_loops
else:
    _hjacobi_table_jit = None
    _basis_table_jit = None


def hjacobi_table(nmax: int, a: float, b: float, d, s) -> np.ndarray:
    """Rows ``n = 0..nmax`` of ``s**n P_n^{(a,b)}(d/s)`` at every point."""
    d = np.ascontiguousarray(d, dtype=float).ravel()
    s = np.ascontiguousarray(s, dtype=float).ravel()
    if _hjacobi_table_jit is not None:
        return _hjacobi_table_jit(int(nmax), float(a), float(b), d, s)
    return _hjacobi_table_numpy(int(nmax), float(a), float(b), d, s)


def basis_table(nmax: int, a: float, b: float, g: float, x, y) -> np.ndarray:
    """All triangle basis values up to total degree ``nmax``.

    Row ``m*(m+1)//2 + k`` holds ``J_{k,m}`` at the points.
    """
    x = np.ascontiguousarray(x, dtype=float).ravel()
    y = np.ascontiguousarray(y, dtype=float).ravel()
    if _basis_table_jit is not None:
        return _basis_table_jit(int(nmax), float(a), float(b), float(g), x, y)
    return _basis_table_numpy(int(nmax), float(a), float(b), float(g), x, y)
