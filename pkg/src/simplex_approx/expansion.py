"""Fourier-Jacobi expansions on the triangle.

A ``CoeffTable`` holds ``fhat_{k,m}`` for ``0 <= k <= m <= N`` in flat
degree-graded order (see ``tri_basis.basis_index``) together with the
squared norms ``h_{k,m}``, so Parseval sums never recompute them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .coeff_relations import A_coeff
from .quadrature import TriangleRule, inner_product, triangle_rule, values_at_nodes
from .tri_basis import WeightParams, basis_index, basis_norms, basis_table, lambda_n, num_basis

DEFAULT_MARGIN = 20
SIGNIFICANCE_FACTOR = 1e3 * np.finfo(float).eps


def _degrees(nmax: int) -> np.ndarray:
    return np.repeat(np.arange(nmax + 1), np.arange(1, nmax + 2))


@dataclass(frozen=True, eq=False)
class CoeffTable:
    params: WeightParams
    max_degree: int
    values: np.ndarray
    norms: np.ndarray = field(repr=False)

    def __post_init__(self):
        size = num_basis(self.max_degree)
        if self.values.shape != (size,) or self.norms.shape != (size,):
            raise ValueError(f"expected {size} entries for max degree {self.max_degree}")
        if np.any(self.norms <= 0):
            raise ValueError("norms must be positive")
        self.values.setflags(write=False)
        self.norms.setflags(write=False)

    @classmethod
    def from_values(cls, values, w: WeightParams, max_degree: int) -> "CoeffTable":
        vals = np.array(values, dtype=float).ravel()
        return cls(w, max_degree, vals, basis_norms(max_degree, w))

    @classmethod
    def zeros(cls, w: WeightParams, max_degree: int) -> "CoeffTable":
        return cls.from_values(np.zeros(num_basis(max_degree)), w, max_degree)

    @classmethod
    def unit(cls, k: int, m: int, w: WeightParams, max_degree: int, value: float = 1.0) -> "CoeffTable":
        vals = np.zeros(num_basis(max_degree))
        vals[basis_index(k, m)] = value
        return cls.from_values(vals, w, max_degree)

    def __getitem__(self, km: tuple[int, int]) -> float:
        k, m = km
        if not 0 <= k <= m <= self.max_degree:
            raise IndexError(f"({k}, {m}) outside table of degree {self.max_degree}")
        return float(self.values[basis_index(k, m)])

    def row(self, m: int) -> np.ndarray:
        start = basis_index(0, m)
        return self.values[start:start + m + 1]

    def rows(self) -> list[list[float]]:
        return [self.row(m).tolist() for m in range(self.max_degree + 1)]

    def truncated(self, n: int) -> "CoeffTable":
        if n > self.max_degree:
            raise ValueError(f"cannot truncate degree {self.max_degree} table to {n}")
        size = num_basis(n)
        return CoeffTable(self.params, n, self.values[:size].copy(), self.norms[:size].copy())

    def degree_energy(self) -> np.ndarray:
        """``sum_k |fhat_{k,m}|^2 h_{k,m}`` for each degree m."""
        return np.bincount(_degrees(self.max_degree), weights=self.values ** 2 * self.norms,
                           minlength=self.max_degree + 1)

    def norm_sq(self) -> float:
        return float(np.sum(self.values ** 2 * self.norms))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def to_json(self) -> str:
        doc = {
            "params": {k: format(v, ".17g") for k, v in zip(("alpha", "beta", "gamma"), self.params.as_tuple())},
            "max_degree": self.max_degree,
            "rows": [[format(v, ".17g") for v in row] for row in self.rows()],
        }
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CoeffTable":
        doc = json.loads(text)
        p = doc["params"]
        w = WeightParams(float(p["alpha"]), float(p["beta"]), float(p["gamma"]))
        nmax = int(doc["max_degree"])
        rows = doc["rows"]
        if len(rows) != nmax + 1 or any(len(row) != m + 1 for m, row in enumerate(rows)):
            raise ValueError("rows are not triangular for the stated max_degree")
        return cls.from_values([float(v) for row in rows for v in row], w, nmax)


def expand(f, w: WeightParams, N: int, rule: Optional[TriangleRule] = None,
           margin: int = DEFAULT_MARGIN) -> CoeffTable:
    """Coefficients ``<f, J_{k,m}> / h_{k,m}`` for all ``k <= m <= N``.

    ``f`` is a callable ``f(x, y)`` or an array of values at the nodes of
    ``rule``. Without a rule, one of order ``2N + margin`` is built;
    ``margin`` is the accuracy knob for non-polynomial ``f``.
    """
    if rule is None:
        rule = triangle_rule(2 * N + margin, w)
    elif rule.params != w:
        raise ValueError(f"rule built for {rule.params}, expansion requested in {w}")
    fvals = values_at_nodes(f, rule)
    basis = basis_table(N, w, rule.x, rule.y)
    norms = basis_norms(N, w)
    values = basis @ (rule.weights * fvals) / norms
    return CoeffTable(w, N, values, norms)


def norm_sq(f, w: WeightParams, rule: TriangleRule) -> float:
    return inner_product(f, f, w, rule)


def partial_sum_eval(tab: CoeffTable, n: int, x, y):
    """Value of ``S_n f`` at the points."""
    if n > tab.max_degree:
        raise ValueError(f"degree {n} exceeds table max degree {tab.max_degree}")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    shape = np.broadcast(xa, ya).shape
    basis = basis_table(n, tab.params, np.broadcast_to(xa, shape), np.broadcast_to(ya, shape))
    vals = (tab.values[:num_basis(n)] @ basis).reshape(shape)
    return float(vals) if vals.ndim == 0 else vals


def best_error(tab: CoeffTable, f_norm_sq: float, n: int, with_flag: bool = False):
    """Best L2 error ``E_n(f)`` from Parseval: ``||f||^2`` minus the energy through degree n.

    The radicand is clamped at 0. With ``with_flag`` a pair ``(E, lost)`` is
    returned where ``lost`` marks a radicand below ``1e3 * eps * ||f||^2``.
    """
    if n > tab.max_degree:
        raise ValueError(f"degree {n} exceeds table max degree {tab.max_degree}")
    kept = float(np.sum(tab.degree_energy()[:n + 1]))
    radicand = f_norm_sq - kept
    lost = radicand < SIGNIFICANCE_FACTOR * f_norm_sq
    value = math.sqrt(max(0.0, radicand))
    return (value, bool(lost)) if with_flag else value


def tail_errors(tab: CoeffTable, f_norm_sq: Optional[float] = None):
    """``E_n(f)`` for every ``n <= N`` as tail sums of the coefficient energy.

    ``E_n^2 = sum_{n < m <= N} energy_m + R_N`` where ``R_N`` is the Parseval
    residual beyond the table. The tail is summed from high degree down, so
    small errors keep their relative accuracy instead of drowning in the
    cancellation of ``||f||^2 - ...``. ``R_N`` is dropped when it is below
    the significance level, where it is indistinguishable from rounding.

    Returns ``(errors, residual_kept)``.
    """
    energy = tab.degree_energy()
    tail = np.concatenate([np.cumsum(energy[::-1])[::-1][1:], [0.0]])
    residual_kept = False
    if f_norm_sq is not None:
        residual = f_norm_sq - float(np.sum(energy))
        if residual >= SIGNIFICANCE_FACTOR * f_norm_sq:
            tail = tail + residual
            residual_kept = True
    return np.sqrt(tail), residual_kept


def apply_D_power(tab: CoeffTable, power: float) -> CoeffTable:
    """Coefficients of ``(-D)^power g``: row m scaled by ``|lambda_m|^power``; row 0 maps to 0."""
    lam = np.array([abs(lambda_n(m, tab.params)) for m in range(tab.max_degree + 1)])
    scale = np.where(lam > 0, lam ** power, 0.0)
    return CoeffTable(tab.params, tab.max_degree, tab.values * scale[_degrees(tab.max_degree)], tab.norms.copy())


@lru_cache(maxsize=128)
def _derivative_operator(N: int, direction: int, r: int, a: float, b: float) -> np.ndarray:
    """Matrix taking degree-N coefficients to those of the r-th derivative (degree N - r)."""
    nout = N - r
    op = np.zeros((num_basis(nout), num_basis(N)))
    sign = -1.0 if r % 2 else 1.0
    for m in range(nout + 1):
        n = m + r
        for k in range(m + 1):
            row = basis_index(k, m)
            if direction == 3:
                op[row, basis_index(k + r, n)] = 1.0
                continue
            for j in range(r + 1):
                if direction == 1:
                    coeff = A_coeff(r, j, k, n, a, b)
                else:
                    coeff = (-1) ** j * A_coeff(r, j, k, n, b, a)
                op[row, basis_index(k + j, n)] = sign * coeff
    op.setflags(write=False)
    return op


def project_derivative(tab: CoeffTable, direction: int, r: int = 1) -> CoeffTable:
    """Coefficients of the r-th derivative in ``direction``, in its shifted weight.

    Degree ``N - r``. Directions 1 and 2 use the closed-form A coefficients;
    direction 3 is the index shift ``fhat_{k+r, m+r}``. No quadrature.
    """
    if r < 0 or r > tab.max_degree:
        raise ValueError(f"derivative order {r} outside 0..{tab.max_degree}")
    if direction not in (1, 2, 3):
        raise ValueError(f"direction must be 1, 2 or 3, got {direction}")
    if r == 0:
        return tab
    w = tab.params
    ws = w.shifted(direction, r)
    nout = tab.max_degree - r
    # direction 3 does not depend on the weight; keep one cached matrix for it
    a, b = (0.0, 0.0) if direction == 3 else (w.alpha, w.beta)
    out = _derivative_operator(tab.max_degree, direction, r, a, b) @ tab.values
    return CoeffTable(ws, nout, out, basis_norms(nout, ws))


def table_from_callable(f: Callable, w: WeightParams, N: int, margin: int = DEFAULT_MARGIN):
    """Expansion together with ``||f||^2`` computed on the same rule."""
    rule = triangle_rule(2 * N + margin, w)
    return expand(f, w, N, rule), norm_sq(f, w, rule)
