"""Extended-precision degree energies for analytic test functions.

For an entire function the best errors ``E_n(f)`` fall below ``1e-16 ||f||``
after a dozen degrees, where double-precision quadrature can no longer
resolve them. This module recomputes the Parseval energies with mpmath at
a chosen number of digits, independently of the double-precision kernels.

In collapsed coordinates ``x = u (1 - t) / 2``, ``y = u (1 + t) / 2`` the
normalized weight factors into a Jacobi measure in ``t`` with parameters
``(alpha, beta)`` and one in ``u`` on [0, 1] with parameters
``(gamma, alpha + beta + 1)``. The functions

    phi_{k,n}(u, t) = p_k(t) u^k q^{(k)}_{n-k}(u) / sqrt(M_k)

with ``p`` orthonormal for the ``t`` measure, ``q^{(k)}`` orthonormal for the
``u`` measure times ``u^{2k}`` and ``M_k`` that measure's mass, form an
orthonormal basis of degree-n polynomials on the triangle spanning the same
spaces as ``J_{k,n}``. The squared coefficients ``<f, phi_{k,n}>^2`` equal
``fhat_{k,n}^2 h_{k,n}``, so per-degree energies agree with ``CoeffTable``.

Quadrature is a tensor Gauss rule whose nodes start from scipy's double
values and are refined by Newton steps on the orthonormal recurrence;
weights are Christoffel numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
import sympy as sp
from scipy import special

from .tri_basis import WeightParams

DEFAULT_DPS = 80
DEFAULT_EXTRA_NODES = 30
# below this the rounding floor 10^(10 - dps) is no finer than double precision
MIN_DPS = 20


def _recurrence(m: int, a, b):
    """Monic Jacobi recurrence on [-1, 1]: diagonal ``d[n]`` and ``e[n] = beta_n`` (``e[0] = 1``)."""
    one = mpmath.mpf(1)
    ab = a + b
    d = [(b - a) / (ab + 2)]
    e = [one]
    for n in range(1, m + 1):
        s = 2 * n + ab
        d.append((b * b - a * a) / (s * (s + 2)))
        if n == 1:
            # written out: the general form is 0/0 when a + b = -1
            e.append(4 * (1 + a) * (1 + b) / ((ab + 2) ** 2 * (ab + 3)))
        else:
            e.append(4 * n * (n + a) * (n + b) * (n + ab) / (s * s * (s + 1) * (s - 1)))
    return d, [mpmath.sqrt(v) for v in e]


def _orthonormal_rows(nmax: int, a, b, t: np.ndarray) -> np.ndarray:
    """Rows ``p_0 .. p_nmax`` at the points ``t``, orthonormal for the probability Jacobi measure."""
    d, s = _recurrence(nmax + 1, a, b)
    out = np.empty((nmax + 1, t.size), dtype=object)
    out[0] = mpmath.mpf(1)
    if nmax >= 1:
        out[1] = (t - d[0]) / s[1]
    for n in range(1, nmax):
        out[n + 1] = ((t - d[n]) * out[n] - s[n] * out[n - 1]) / s[n + 1]
    return out


def _newton_step(m: int, a, b, t):
    d, s = _recurrence(m, a, b)
    p_prev, p = mpmath.mpf(0), mpmath.mpf(1)
    dp_prev, dp = mpmath.mpf(0), mpmath.mpf(0)
    for n in range(m):
        p_next = ((t - d[n]) * p - s[n] * p_prev) / s[n + 1]
        dp_next = ((t - d[n]) * dp + p - s[n] * dp_prev) / s[n + 1]
        p_prev, p, dp_prev, dp = p, p_next, dp, dp_next
    return p / dp


@lru_cache(maxsize=32)
def gauss_rule(m: int, a: float, b: float, dps: int) -> tuple[np.ndarray, np.ndarray]:
    """m-point Gauss rule for ``(1-t)^a (1+t)^b`` normalized to unit mass, at ``dps`` digits."""
    with mpmath.workdps(dps + 10):
        ma, mb = mpmath.mpf(a), mpmath.mpf(b)
        start, _ = special.roots_jacobi(m, a, b)
        nodes = []
        for x0 in start:
            t = mpmath.mpf(float(x0))
            # quadratic convergence from ~1e-15: each step doubles the digits
            for _ in range(int(np.ceil(np.log2((dps + 10) / 14.0))) + 2):
                t = t - _newton_step(m, ma, mb, t)
            nodes.append(t)
        t = np.array(nodes, dtype=object)
        rows = _orthonormal_rows(m - 1, ma, mb, t)
        weights = np.array([1 / mpmath.fsum(rows[:, i] ** 2) for i in range(m)], dtype=object)
    return t, weights


@dataclass(frozen=True)
class Energies:
    """Per-degree energies ``sum_k <f, phi_{k,n}>^2`` for ``n <= N`` and ``||f||^2``, as mpf."""

    params: WeightParams
    degree: np.ndarray
    norm_sq: mpmath.mpf
    dps: int

    def tail_errors(self) -> list:
        """``E_n`` for ``n <= N`` as tail sums of the energies.

        The Parseval residual beyond N is added only when it exceeds the
        rounding level ``10^(10 - dps) ||f||^2`` of the subtraction. When
        it is dropped the last few values below N are lower bounds, so
        expand a few degrees past the range of interest.
        """
        with mpmath.workdps(self.dps + 10):
            residual = self.norm_sq - mpmath.fsum(self.degree)
            if residual < mpmath.mpf(10) ** (10 - self.dps) * self.norm_sq:
                residual = mpmath.mpf(0)
            out, acc = [], residual
            for e in reversed(self.degree):
                out.append(mpmath.sqrt(acc))
                acc += e
        return out[::-1]


def _mp_callable(expr: sp.Expr):
    x, y = sp.symbols("x y", real=True)
    return sp.lambdify((x, y), expr, modules="mpmath")


def degree_energies(expr: sp.Expr, w: WeightParams, N: int, dps: int = DEFAULT_DPS,
                    extra_nodes: int = DEFAULT_EXTRA_NODES) -> Energies:
    """Orthonormal expansion energies of a sympy expression in ``x, y`` through degree N.

    Accurate to about ``10^-dps ||f||`` when ``f`` is analytic on a
    neighbourhood of the triangle; for functions of finite smoothness the
    quadrature error dominates and the result is no better than the double
    precision route.
    """
    if N < 0:
        raise ValueError("degree must be non-negative")
    if dps < MIN_DPS:
        raise ValueError(f"dps must be at least {MIN_DPS}, got {dps}")
    f = _mp_callable(expr)
    m = N + extra_nodes
    a, b, g = w.as_tuple()
    t, vt = gauss_rule(m, a, b, dps)
    s, vu = gauss_rule(m, g, a + b + 1.0, dps)
    with mpmath.workdps(dps + 10):
        u = (1 + s) / 2
        x = np.array([[ui * (1 - tj) / 2 for tj in t] for ui in u], dtype=object)
        y = np.array([[ui * (1 + tj) / 2 for tj in t] for ui in u], dtype=object)
        fv = np.array([[mpmath.mpf(f(x[i, j], y[i, j])) for j in range(m)] for i in range(m)], dtype=object)
        norm_sq = mpmath.fsum((vu[:, None] * vt[None, :] * fv * fv).ravel())
        pt = _orthonormal_rows(N, mpmath.mpf(a), mpmath.mpf(b), t)
        # F[k, i] = sum_j vt_j f(u_i, t_j) p_k(t_j)
        F = (pt * vt[None, :]).dot(fv.T)
        degree = [mpmath.mpf(0)] * (N + 1)
        upow = np.array([mpmath.mpf(1)] * m, dtype=object)
        for k in range(N + 1):
            weighted = vu * upow * upow
            mass = mpmath.fsum(weighted)
            q = _orthonormal_rows(N - k, mpmath.mpf(g), mpmath.mpf(2 * k + a + b + 1.0), s)
            coeffs = q.dot(vu * upow * F[k]) / mpmath.sqrt(mass)
            for j, c in enumerate(coeffs):
                degree[k + j] += c * c
            upow = upow * u
    return Energies(w, np.array(degree, dtype=object), norm_sq, dps)
