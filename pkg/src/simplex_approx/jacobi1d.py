"""One-dimensional Jacobi polynomials and Gauss-Jacobi quadrature.

Conventions
-----------
``P_n^{(a,b)}`` is the classical (Szego) Jacobi polynomial with
``P_n(1) = (a+1)_n / n!``. The rescaled polynomial used throughout the
package is

    J_n^{a,b}(t) = P_n^{(a,b)}(t) / (n + a + b + 1)_n,

chosen so that ``d/dt J_n^{a,b}(2t - 1) = J_{n-1}^{a+1,b+1}(2t - 1)``.
Values are computed in the P normalization and divided at the end; the
J values decay quickly with n and recursing on them directly loses digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg as sla
from scipy import special

from . import _kernels


class QuadratureError(RuntimeError):
    """Raised when a quadrature rule cannot be constructed reliably."""


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})")


def pochhammer(a, n: int):
    """Rising factorial ``a (a+1) ... (a+n-1)``; ``(a)_0 = 1``.

    Returns the literal product, so non-positive ``a`` may give 0 or a
    negative value. Works for any numeric type closed under ``+`` and ``*``
    (float, int, Fraction).
    """
    if n < 0:
        raise ValueError("pochhammer length must be non-negative")
    acc = a - a + 1  # unit of a's type
    for i in range(n):
        acc = acc * (a + i)
    return acc


def _as_points(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def jacobi_P_table(nmax: int, alpha: float, beta: float, t) -> np.ndarray:
    """Rows ``P_0 .. P_nmax`` evaluated at the 1-D array ``t``."""
    t = np.asarray(t, dtype=float).ravel()
    return _kernels.hjacobi_table(nmax, alpha, beta, t, np.ones_like(t))


def jacobi_P(n: int, alpha: float, beta: float, t):
    """Classical Jacobi polynomial ``P_n^{(alpha,beta)}(t)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    arr, scalar = _as_points(t)
    vals = jacobi_P_table(n, alpha, beta, arr)[n].reshape(arr.shape)
    return float(vals) if scalar else vals


def jacobi_J(n: int, alpha: float, beta: float, t):
    """``P_n^{(alpha,beta)}(t) / (n + alpha + beta + 1)_n``."""
    return jacobi_P(n, alpha, beta, t) / pochhammer(n + alpha + beta + 1.0, n)


def jacobi_J_shifted_deriv(n: int, alpha: float, beta: float, t, r: int = 0):
    """r-th derivative in ``t`` of ``J_n^{alpha,beta}(2t - 1)`` for ``t`` in [0, 1].

    Each derivative raises both parameters by one and lowers the degree by
    one. For ``r > n`` the result is 0.
    """
    if r < 0:
        raise ValueError("derivative order must be non-negative")
    if r > n:
        arr, scalar = _as_points(t)
        return 0.0 if scalar else np.zeros_like(arr)
    return jacobi_J(n - r, alpha + r, beta + r, 2.0 * np.asarray(t, dtype=float) - 1.0)


def jacobi_mass(alpha: float, beta: float) -> float:
    """Integral of ``(1-t)^alpha (1+t)^beta`` over [-1, 1]."""
    return math.exp((alpha + beta + 1) * math.log(2.0) + special.betaln(alpha + 1, beta + 1))


@dataclass(frozen=True)
class GaussRule1D:
    nodes: np.ndarray
    weights: np.ndarray
    params: JacobiParams

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


def _recurrence_tridiagonal(m: int, a: float, b: float):
    """Diagonal and off-diagonal of the Jacobi matrix for the orthonormal polynomials."""
    n = np.arange(m, dtype=float)
    ab = a + b
    diag = np.empty(m)
    diag[0] = (b - a) / (ab + 2.0)
    if m > 1:
        nn = n[1:]
        diag[1:] = (b * b - a * a) / ((2 * nn + ab) * (2 * nn + ab + 2.0))
    off = np.empty(max(m - 1, 0))
    if m > 1:
        # n = 1 written separately: the general form is 0/0 when a + b = -1
        off[0] = 4.0 * (1 + a) * (1 + b) / ((ab + 2.0) ** 2 * (ab + 3.0))
        nn = n[2:]
        off[1:] = (4.0 * nn * (nn + a) * (nn + b) * (nn + ab)
                   / ((2 * nn + ab) ** 2 * (2 * nn + ab + 1.0) * (2 * nn + ab - 1.0)))
    return diag, np.sqrt(off)


@lru_cache(maxsize=256)
def _gauss_jacobi_cached(m: int, alpha: float, beta: float):
    diag, off = _recurrence_tridiagonal(m, alpha, beta)
    try:
        nodes, vecs = sla.eigh_tridiagonal(diag, off, lapack_driver="stev")
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise QuadratureError(f"eigen solve failed for m={m}, alpha={alpha}, beta={beta}") from exc
    if not np.all(np.isfinite(nodes)) or not np.all(np.isfinite(vecs)):
        raise QuadratureError("non-finite nodes or weights")
    order = np.argsort(nodes)
    nodes = nodes[order]
    weights = jacobi_mass(alpha, beta) * vecs[0, order] ** 2
    if np.any(np.diff(nodes) <= 0) or nodes[0] <= -1 or nodes[-1] >= 1 or np.any(weights <= 0):
        raise QuadratureError(f"degenerate Gauss-Jacobi rule for m={m}, alpha={alpha}, beta={beta}")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_jacobi_rule(m: int, alpha: float, beta: float) -> GaussRule1D:
    """m-point Gauss rule for the weight ``(1-t)^alpha (1+t)^beta`` on [-1, 1].

    Nodes are eigenvalues of the symmetric tridiagonal Jacobi matrix
    (Golub-Welsch); weights are the mass times the squared first
    eigenvector components. Exact for polynomials of degree ``2m - 1``.
    """
    if m < 1:
        raise ValueError("rule size must be at least 1")
    params = JacobiParams(float(alpha), float(beta))
    nodes, weights = _gauss_jacobi_cached(int(m), params.alpha, params.beta)
    return GaussRule1D(nodes=nodes, weights=weights, params=params)
