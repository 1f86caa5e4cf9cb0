"""Orthogonal basis on the unit triangle for the Jacobi weight.

The weight is ``x^alpha y^beta (1-x-y)^gamma`` on
``{x >= 0, y >= 0, x + y <= 1}``. For ``0 <= k <= n`` the basis element is

    J_{k,n}(x, y) = (x+y)^k J_k^{alpha,beta}((y-x)/(x+y))
                    * J_{n-k}^{2k+alpha+beta+1,gamma}(1 - 2x - 2y).

The first factor is a homogeneous polynomial of degree k and is evaluated
in that form (see ``_kernels``), so the apex ``x = y = 0`` needs no special
casing.

Directional derivatives use ``d1 = d/dx``, ``d2 = d/dy`` and
``d3 = d2 - d1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .jacobi1d import pochhammer


class DomainError(ValueError):
    """A parameter combination outside the domain of a closed form."""


@dataclass(frozen=True)
class WeightParams:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not value > -1:
                raise ValueError(f"{name} must exceed -1, got {value}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    def shifted(self, direction: int, r: int = 1) -> "WeightParams":
        """Weight in which the r-th derivative in ``direction`` lives."""
        a, b, g = self.as_tuple()
        if direction == 1:
            return WeightParams(a + r, b, g + r)
        if direction == 2:
            return WeightParams(a, b + r, g + r)
        if direction == 3:
            return WeightParams(a + r, b + r, g)
        raise ValueError(f"direction must be 1, 2 or 3, got {direction}")


@dataclass(frozen=True)
class BasisIndex:
    k: int
    n: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n:
            raise ValueError(f"basis index requires 0 <= k <= n, got ({self.k}, {self.n})")


def basis_index(k: int, n: int) -> int:
    """Flat position of ``J_{k,n}`` in degree-graded order."""
    return n * (n + 1) // 2 + k


def num_basis(nmax: int) -> int:
    return (nmax + 1) * (nmax + 2) // 2


def in_triangle(x, y, tol: float = 0.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (x >= -tol) & (y >= -tol) & (x + y <= 1 + tol)


def basis_table(nmax: int, w: WeightParams, x, y) -> np.ndarray:
    """Values of every ``J_{k,m}``, ``m <= nmax``, at the points; shape (num_basis, npts)."""
    return _kernels.basis_table(nmax, w.alpha, w.beta, w.gamma, x, y)


def basis_eval(k: int, n: int, w: WeightParams, x, y):
    """Value of ``J_{k,n}`` at ``(x, y)`` (scalars or arrays of equal shape)."""
    BasisIndex(k, n)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    shape = np.broadcast(xa, ya).shape
    xf = np.broadcast_to(xa, shape).ravel()
    yf = np.broadcast_to(ya, shape).ravel()
    a, b, g = w.as_tuple()
    first = _kernels.hjacobi_table(k, a, b, yf - xf, xf + yf)[k] / pochhammer(k + a + b + 1.0, k)
    big_a = 2.0 * k + a + b + 1.0
    z = 1.0 - 2.0 * xf - 2.0 * yf
    second = _kernels.hjacobi_table(n - k, big_a, g, z, np.ones_like(z))[n - k]
    second = second / pochhammer(n - k + big_a + g + 1.0, n - k)
    vals = (first * second).reshape(shape)
    return float(vals) if vals.ndim == 0 else vals


def _log_poch(a: float, n: int) -> list[float]:
    return [math.log(a + i) for i in range(n)]


def basis_norm_h(k: int, n: int, w: WeightParams) -> float:
    """Squared norm ``<J_{k,n}, J_{k,n}>`` under the normalized inner product.

    The ratios ``(a+b+1)_k / (a+b+1)_{2k}`` and ``(c)_{n+k} / (c)_{2n}`` with
    ``c = a+b+g+2`` are cancelled before evaluation (both are 0/0 on the
    boundary cases ``a+b = -1`` and ``c = 0``). The product is accumulated
    as a sum of logarithms to stay in range for large n.
    """
    BasisIndex(k, n)
    a, b, g = w.as_tuple()
    c = a + b + g + 2.0
    num = (_log_poch(a + 1, k) + _log_poch(b + 1, k) + _log_poch(g + 1, n - k)
           + _log_poch(a + b + 2, n + k))
    den = (_log_poch(1.0, k) + _log_poch(1.0, n - k) + _log_poch(a + b + 1 + k, k)
           + _log_poch(a + b + 2, 2 * k) + _log_poch(c + n + k, n - k) + _log_poch(c + 1, 2 * n))
    return math.exp(math.fsum(num) - math.fsum(den))


@lru_cache(maxsize=256)
def _basis_norms_cached(nmax: int, a: float, b: float, g: float) -> np.ndarray:
    w = WeightParams(a, b, g)
    out = np.empty(num_basis(nmax))
    for m in range(nmax + 1):
        for k in range(m + 1):
            out[basis_index(k, m)] = basis_norm_h(k, m, w)
    out.setflags(write=False)
    return out


def basis_norms(nmax: int, w: WeightParams) -> np.ndarray:
    """``h_{k,m}`` for all ``m <= nmax`` in flat degree-graded order (read-only)."""
    return _basis_norms_cached(int(nmax), *w.as_tuple())


def a_coeff(k: int, n: int, alpha, beta):
    """``(k+beta)(n+k+alpha+beta+1) / ((2k+alpha+beta)(2k+alpha+beta+1))``.

    Generic over the numeric type of ``alpha`` and ``beta``.
    """
    s = 2 * k + alpha + beta
    if s == 0 or s + 1 == 0:
        raise DomainError(f"a-coefficient undefined for k={k}, alpha={alpha}, beta={beta}")
    return (k + beta) * (n + k + alpha + beta + 1) / (s * (s + 1))


def basis_partial(direction: int, k: int, n: int, w: WeightParams, x, y):
    """First derivative of ``J_{k,n}`` in direction 1, 2 or 3.

    Evaluated from the lower-degree expansion of the derivative in the
    shifted weight; terms whose index leaves ``0 <= k <= n`` are dropped.
    """
    BasisIndex(k, n)
    a, b, _ = w.as_tuple()
    ws = w.shifted(direction)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(xa, ya).shape)
    if direction == 1:
        if k >= 1:
            total = total - a_coeff(k, n, a, b) * basis_eval(k - 1, n - 1, ws, xa, ya)
        if k <= n - 1:
            total = total - basis_eval(k, n - 1, ws, xa, ya)
    elif direction == 2:
        if k >= 1:
            total = total + a_coeff(k, n, b, a) * basis_eval(k - 1, n - 1, ws, xa, ya)
        if k <= n - 1:
            total = total - basis_eval(k, n - 1, ws, xa, ya)
    else:
        if k >= 1:
            total = total + basis_eval(k - 1, n - 1, ws, xa, ya)
    return float(total) if total.ndim == 0 else total


def lambda_n(n: int, w: WeightParams) -> float:
    """Eigenvalue ``-n (n + alpha + beta + gamma + 2)`` of the weighted operator on degree-n polynomials."""
    return -n * (n + w.alpha + w.beta + w.gamma + 2.0)


_DIRECTIONS = {1: (1.0, 0.0), 2: (0.0, 1.0), 3: (-1.0, 1.0)}


def weight_value(w: WeightParams, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x ** w.alpha * y ** w.beta * (1.0 - x - y) ** w.gamma


def apply_operator_fd(f, w: WeightParams, x, y, h: float = 1e-4):
    """Finite-difference value of the second-order weighted operator applied to ``f``.

    Computes ``w^{-1} sum_i d_i( w_i d_i f )`` with ``w_i`` the weight shifted
    for direction i, using nested centered differences of step ``h``. Points
    must sit at least ``2h`` inside the triangle.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape)
    for direction, (ex, ey) in _DIRECTIONS.items():
        ws = w.shifted(direction)

        def flux(px, py, ex=ex, ey=ey, ws=ws):
            df = (f(px + h * ex, py + h * ey) - f(px - h * ex, py - h * ey)) / (2 * h)
            return weight_value(ws, px, py) * df

        total = total + (flux(x + h * ex, y + h * ey) - flux(x - h * ex, y - h * ey)) / (2 * h)
    return total / weight_value(w, x, y)
