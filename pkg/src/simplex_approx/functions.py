"""Registry of test functions used by the experiments and the CLI.

Two kinds of specimen share one interface:

* ``AnalyticSpecimen`` wraps a sympy expression. Values and directional
  derivatives are lambdified to numpy, and expansions come from quadrature.
* ``PolynomialSpecimen`` is given by its coefficient table in the working
  weight. Derivative tables come from the exact coefficient relations, so
  no quadrature is involved.

Registry ids are plain names (``exp_x2y``), ``mode:k,n`` for a single basis
element and ``randpoly:d`` for a random polynomial of degree d whose
coefficients are drawn from the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import sympy as sp

from .expansion import DEFAULT_MARGIN, CoeffTable, project_derivative, table_from_callable
from .tri_basis import WeightParams, basis_norms, num_basis

X, Y = sp.symbols("x y", real=True)


def directional(expr: sp.Expr, direction: int, r: int) -> sp.Expr:
    """r-th derivative along ``d/dx``, ``d/dy`` or ``d/dy - d/dx``."""
    out = expr
    for _ in range(r):
        if direction == 1:
            out = sp.diff(out, X)
        elif direction == 2:
            out = sp.diff(out, Y)
        elif direction == 3:
            out = sp.diff(out, Y) - sp.diff(out, X)
        else:
            raise ValueError(f"direction must be 1, 2 or 3, got {direction}")
    # point masses from differentiating sign(u) only appear multiplied by a
    # vanishing power of |u| here; the L2 (weak) derivative drops them
    out = out.replace(sp.DiracDelta, lambda *args: sp.Integer(0))
    # no simplify: it rewrites sign(u) sqrt|u| into forms that are NaN for u < 0
    return out


def _lambdify(expr: sp.Expr) -> Callable:
    raw = sp.lambdify((X, Y), expr, modules="numpy")

    def call(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(np.asarray(raw(x, y), dtype=float), np.broadcast(x, y).shape)

    return call


@dataclass(frozen=True)
class AnalyticSpecimen:
    name: str
    expr: sp.Expr
    description: str = ""
    polynomial_degree: Optional[int] = None

    def __call__(self, x, y):
        return _compiled(self.expr)(x, y)

    def derivative(self, direction: int, r: int) -> Callable:
        return _compiled(_derivative_expr(self.expr, direction, r))

    def expansion(self, w: WeightParams, N: int, margin: int = DEFAULT_MARGIN):
        """``(table, ||f||^2)`` in weight ``w`` through degree N.

        For a polynomial of known degree the coefficients above that degree
        are exactly zero and are set so, rather than left as quadrature noise.
        """
        tab, nsq = table_from_callable(self, w, N, margin)
        return _cut_above(tab, self.polynomial_degree), nsq

    def derivative_expansion(self, direction: int, r: int, w: WeightParams, N: int,
                             margin: int = DEFAULT_MARGIN):
        """``(table, ||d^r f||^2)`` in the shifted weight for ``direction``."""
        tab, nsq = table_from_callable(self.derivative(direction, r), w.shifted(direction, r), N, margin)
        if self.polynomial_degree is not None and r > self.polynomial_degree:
            return CoeffTable.zeros(tab.params, N), 0.0
        degree = None if self.polynomial_degree is None else self.polynomial_degree - r
        return _cut_above(tab, degree), nsq


@lru_cache(maxsize=None)
def _compiled(expr: sp.Expr) -> Callable:
    return _lambdify(expr)


@lru_cache(maxsize=None)
def _derivative_expr(expr: sp.Expr, direction: int, r: int) -> sp.Expr:
    return directional(expr, direction, r)


def symbolic_basis(k: int, n: int, alpha, beta, gamma) -> sp.Expr:
    """``J_{k,n}`` as a sympy expression built from sympy's Jacobi polynomials.

    Serves as an oracle independent of the recurrence kernels; pass
    ``sympy.Rational`` parameters for exact coefficients.
    """
    a, b, g = (sp.nsimplify(v) for v in (alpha, beta, gamma))
    t = sp.Symbol("t")

    def jac(m, p, q, arg):
        return (sp.jacobi(m, p, q, t) / sp.rf(m + p + q + 1, m)).subs(t, arg)

    s = X + Y
    first = sp.expand(sp.cancel(s ** k * jac(k, a, b, (Y - X) / s))) if k else sp.Integer(1)
    second = jac(n - k, 2 * k + a + b + 1, g, 1 - 2 * X - 2 * Y)
    return sp.expand(first * second)


def symbolic_basis_partial(k: int, n: int, alpha, beta, gamma, direction: int) -> Callable:
    """Numpy callable for the exact first derivative of ``J_{k,n}`` in ``direction``."""
    return _lambdify(directional(symbolic_basis(k, n, alpha, beta, gamma), direction, 1))


def _cut_above(tab: CoeffTable, degree: Optional[int]) -> CoeffTable:
    """Zero the coefficients of degree above ``degree`` (None keeps all)."""
    if degree is None or degree >= tab.max_degree:
        return tab
    values = tab.values.copy()
    values[num_basis(degree):] = 0.0
    return CoeffTable(tab.params, tab.max_degree, values, tab.norms.copy())


def _resize(tab: CoeffTable, N: int) -> CoeffTable:
    """Truncate, or pad with zeros, to max degree N."""
    if N <= tab.max_degree:
        return tab.truncated(N)
    values = np.zeros(num_basis(N))
    values[:tab.values.size] = tab.values
    return CoeffTable(tab.params, N, values, basis_norms(N, tab.params))


@dataclass(frozen=True)
class PolynomialSpecimen:
    """A polynomial specified through its coefficients in the working weight.

    ``builder(w)`` returns the coefficient table in weight ``w``; norms are
    exact Parseval sums, and derivatives use ``project_derivative``.
    """

    name: str
    builder: Callable[[WeightParams], CoeffTable] = field(compare=False)
    degree: int = 0
    description: str = ""

    @property
    def polynomial_degree(self) -> int:
        return self.degree

    def table(self, w: WeightParams) -> CoeffTable:
        return self.builder(w)

    def expansion(self, w: WeightParams, N: int, margin: int = DEFAULT_MARGIN):
        tab = self.builder(w)
        return _resize(tab, N), tab.norm_sq()

    def derivative_expansion(self, direction: int, r: int, w: WeightParams, N: int,
                             margin: int = DEFAULT_MARGIN):
        tab = self.builder(w)
        if r > tab.max_degree:
            ws = w.shifted(direction, r)
            return CoeffTable.zeros(ws, N), 0.0
        deriv = project_derivative(tab, direction, r)
        return _resize(deriv, N), deriv.norm_sq()


def single_mode(k: int, n: int, value: float = 1.0) -> PolynomialSpecimen:
    """The basis element ``J_{k,n}`` of whatever weight is requested."""
    return PolynomialSpecimen(f"mode:{k},{n}", lambda w: CoeffTable.unit(k, n, w, n, value), n,
                              "single basis element")


def random_polynomial_table(w: WeightParams, degree: int, rng: np.random.Generator) -> CoeffTable:
    """Coefficients ``z / sqrt(h)`` with standard normal z.

    Every basis direction then carries unit expected energy, so the
    ensemble does not favour low-norm modes.
    """
    h = basis_norms(degree, w)
    return CoeffTable(w, degree, rng.standard_normal(h.size) / np.sqrt(h), h)


def random_polynomial(degree: int, seed: int = 0) -> PolynomialSpecimen:
    def build(w: WeightParams) -> CoeffTable:
        return random_polynomial_table(w, degree, np.random.default_rng(seed))
    return PolynomialSpecimen(f"randpoly:{degree}", build, degree, "random polynomial")


_ANALYTIC = {
    "exp_x2y": (sp.exp(X + 2 * Y), "exp(x + 2y)", None),
    "exp_xy": (sp.exp(X * Y), "exp(x y)", None),
    "exp_xpy": (sp.exp(X + Y), "exp(x + y)", None),
    "cos_pi_sum": (sp.cos(sp.pi * (X + Y)), "cos(pi (x + y))", None),
    "abs_32": (sp.Abs(sp.Rational(1, 2) - X - Y) ** sp.Rational(3, 2), "|1/2 - x - y|^(3/2)", None),
    "x2y": (X ** 2 * Y, "x^2 y", 3),
    "poly5": (1 + X - 2 * Y + X * Y ** 2 - 3 * X ** 3 * Y + (X + 2 * Y) ** 5, "fixed degree-5 polynomial", 5),
    "const": (sp.Integer(1), "constant 1", 0),
}


def registry_ids() -> list[str]:
    return sorted(_ANALYTIC) + ["mode:k,n", "randpoly:d"]


def get_specimen(spec_id: str, seed: int = 0):
    """Look up a specimen by registry id."""
    if spec_id in _ANALYTIC:
        expr, desc, degree = _ANALYTIC[spec_id]
        return AnalyticSpecimen(spec_id, expr, desc, degree)
    if spec_id.startswith("mode:"):
        try:
            k, n = (int(v) for v in spec_id[5:].split(","))
        except ValueError as exc:
            raise ValueError(f"expected mode:k,n, got {spec_id!r}") from exc
        if not 0 <= k <= n:
            raise ValueError(f"mode index needs 0 <= k <= n, got {spec_id!r}")
        return single_mode(k, n)
    if spec_id.startswith("randpoly:"):
        try:
            degree = int(spec_id[9:])
        except ValueError as exc:
            raise ValueError(f"expected randpoly:d, got {spec_id!r}") from exc
        if degree < 0:
            raise ValueError("degree must be non-negative")
        return random_polynomial(degree, seed)
    raise KeyError(f"unknown function id {spec_id!r}; known: {', '.join(registry_ids())}")
