"""Weighted Fourier-Jacobi analysis on the unit triangle.

Orthogonal basis for the Jacobi weight ``x^a y^b (1-x-y)^g``, quadrature,
best L2 approximation, the linear algebra linking coefficients of a
function and of its derivatives, exact rational checks of the associated
determinant and summation identities, and bounded-ratio experiments for the
approximation estimates.
"""

__version__ = "0.1.0"

from .coeff_relations import A_coeff, build_Mr, det_Mr_closed, solve_B
from .expansion import CoeffTable, apply_D_power, best_error, expand, partial_sum_eval, project_derivative
from .jacobi1d import gauss_jacobi_rule, jacobi_J, jacobi_P, pochhammer
from .quadrature import TriangleRule, inner_product, triangle_rule
from .tri_basis import BasisIndex, WeightParams, basis_eval, basis_norm_h, basis_partial, lambda_n

__all__ = [
    "A_coeff", "BasisIndex", "CoeffTable", "TriangleRule", "WeightParams", "apply_D_power",
    "basis_eval", "basis_norm_h", "basis_partial", "best_error", "build_Mr", "det_Mr_closed",
    "expand", "gauss_jacobi_rule", "inner_product", "jacobi_J", "jacobi_P", "lambda_n",
    "partial_sum_eval", "pochhammer", "project_derivative", "solve_B", "triangle_rule",
]
