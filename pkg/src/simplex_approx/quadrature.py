"""Weighted quadrature on the triangle and the normalized inner product.

Rules are tensor products in collapsed coordinates

    x = u (1 - t) / 2,   y = u (1 + t) / 2,   u in [0, 1], t in [-1, 1],

under which ``x^a y^b (1-x-y)^g dx dy`` becomes a constant times
``u^{a+b+1} (1-u)^g du * (1-t)^a (1+t)^b dt``: the Jacobian factor ``u`` is
absorbed into the u-weight, so both axes are plain Gauss-Jacobi rules and a
bivariate polynomial of total degree d needs degree d on each axis.
Weights are scaled to sum to 1, which is the normalization ``<1, 1> = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np
from scipy import special

from .jacobi1d import gauss_jacobi_rule
from .tri_basis import WeightParams

Integrand = Union[Callable[[np.ndarray, np.ndarray], np.ndarray], np.ndarray, float]


@dataclass(frozen=True)
class TriangleRule:
    x: np.ndarray
    y: np.ndarray
    weights: np.ndarray
    params: WeightParams
    exact_degree: int

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])


def c_const(w: WeightParams) -> float:
    """``Gamma(a+b+g+3) / (Gamma(a+1) Gamma(b+1) Gamma(g+1))``, computed in log space."""
    a, b, g = w.as_tuple()
    return math.exp(special.gammaln(a + b + g + 3) - special.gammaln(a + 1)
                    - special.gammaln(b + 1) - special.gammaln(g + 1))


def dirichlet_moment(i: int, j: int, w: WeightParams) -> float:
    """Normalized moment ``<x^i y^j, 1>`` from the Dirichlet integral."""
    a, b, g = w.as_tuple()
    log_int = (special.gammaln(a + i + 1) + special.gammaln(b + j + 1) + special.gammaln(g + 1)
               - special.gammaln(a + b + g + i + j + 3))
    return c_const(w) * math.exp(log_int)


@lru_cache(maxsize=64)
def _triangle_rule_cached(order: int, a: float, b: float, g: float):
    m = order // 2 + 1
    rule_u = gauss_jacobi_rule(m, g, a + b + 1.0)
    rule_t = gauss_jacobi_rule(m, a, b)
    u = 0.5 * (1.0 + rule_u.nodes)
    wu = rule_u.weights / rule_u.weights.sum()
    t = rule_t.nodes
    wt = rule_t.weights / rule_t.weights.sum()
    uu, tt = np.meshgrid(u, t, indexing="ij")
    x = (uu * (1.0 - tt) / 2.0).ravel()
    y = (uu * (1.0 + tt) / 2.0).ravel()
    weights = np.outer(wu, wt).ravel()
    for arr in (x, y, weights):
        arr.setflags(write=False)
    return x, y, weights, 2 * m - 1


def triangle_rule(order: int, w: WeightParams) -> TriangleRule:
    """Tensor Gauss-Jacobi rule exact for weighted integrands of total degree ``order``."""
    if order < 0:
        raise ValueError("order must be non-negative")
    x, y, weights, exact = _triangle_rule_cached(int(order), *w.as_tuple())
    return TriangleRule(x=x, y=y, weights=weights, params=w, exact_degree=exact)


def values_at_nodes(f: Integrand, rule: TriangleRule) -> np.ndarray:
    if callable(f):
        vals = np.asarray(f(rule.x, rule.y), dtype=float)
    else:
        vals = np.asarray(f, dtype=float)
    return np.broadcast_to(vals, rule.x.shape)


def integrate(f: Integrand, rule: TriangleRule) -> float:
    """Normalized weighted integral ``c * int f w``; pairwise summation, fixed order."""
    return float(np.sum(rule.weights * values_at_nodes(f, rule)))


def inner_product(f: Integrand, g: Integrand, w: WeightParams, rule: TriangleRule) -> float:
    """``<f, g>`` in the weight ``w``, approximated with ``rule``.

    Exact when ``f * g`` is a polynomial of degree at most ``rule.exact_degree``.
    """
    if rule.params != w:
        raise ValueError(f"rule built for {rule.params}, inner product requested in {w}")
    fg = values_at_nodes(f, rule) * values_at_nodes(g, rule)
    return float(np.sum(rule.weights * fg))
