"""Linear relations between Fourier coefficients of f and of its derivatives.

For the r-th derivative in direction 1 the coefficients in the shifted
weight ``(a+r, b, g+r)`` are, up to the sign ``(-1)^r``, the combinations

    sum_{j=0}^{r} A_{r,j,k,n}^{a,b} fhat_{k+j,n}

and direction 2 is the same with ``a`` and ``b`` swapped and alternating
signs. Stacking r rows of each gives the 2r x 2r band matrix ``M_r(k,n)``
whose first inverse row recovers ``fhat_{k,n}`` from derivative data.

The scalar functions here are generic over the numeric type of ``alpha``
and ``beta``: pass ``fractions.Fraction`` values to get exact results.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import linalg as sla

from .jacobi1d import pochhammer
from .tri_basis import WeightParams, a_coeff


class SingularMatrixError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ACoeffSpec:
    r: int
    j: int
    k: int
    n: int
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0 <= self.j <= self.r:
            raise ValueError(f"offset j must satisfy 0 <= j <= r, got j={self.j}, r={self.r}")


def A_coeff(r: int, j: int, k: int, n: int, alpha, beta):
    """Closed-form A coefficient; zero when ``j`` is outside ``0..r``."""
    if j < 0 or j > r:
        return 0 * (alpha + beta)
    s = 2 * k + alpha + beta
    num = comb(r, j) * pochhammer(k + beta + 1, j) * pochhammer(n + k + alpha + beta + 2, j)
    den = pochhammer(s + j + 1, j) * pochhammer(s + r + 2, j)
    return num / den


def A_coeff_spec(spec: ACoeffSpec):
    return A_coeff(spec.r, spec.j, spec.k, spec.n, spec.alpha, spec.beta)


def A_coeff_by_recursion(r: int, j: int, k: int, n: int, alpha, beta):
    """A coefficient built from r = 1 by the induction step.

    ``A_{1,0} = 1``, ``A_{1,1,k,n} = a_{k+1,n}`` and
    ``A_{r+1,j,k,n} = A_{r,j,k,n} + a_{k+1,n-r}^{alpha+r,beta} A_{r,j-1,k+1,n}``.
    """
    one = 0 * (alpha + beta) + 1
    if j < 0 or j > r:
        return 0 * one
    if r == 1:
        return one if j == 0 else a_coeff(k + 1, n, alpha, beta)
    prev = A_coeff_by_recursion(r - 1, j, k, n, alpha, beta)
    if j == 0:
        return prev
    step = a_coeff(k + 1, n - (r - 1), alpha + (r - 1), beta)
    return prev + step * A_coeff_by_recursion(r - 1, j - 1, k + 1, n, alpha, beta)


def mr_entries(r: int, k: int, n: int, alpha, beta) -> list[list]:
    """Entries of ``M_r(k,n)`` as nested lists in the numeric type of the parameters."""
    size = 2 * r
    zero = 0 * (alpha + beta)
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i < r:
                row.append(A_coeff(r, j - i, k + i, n, alpha, beta))
            else:
                off = j - i + r
                if 0 <= off <= r:
                    sign = -1 if off % 2 else 1
                    row.append(sign * A_coeff(r, off, k + i - r, n, beta, alpha))
                else:
                    row.append(zero)
        rows.append(row)
    return rows


def _A_without_n(r: int, j: int, k: int, alpha, beta):
    if j < 0 or j > r:
        return 0 * (alpha + beta)
    s = 2 * k + alpha + beta
    return comb(r, j) * pochhammer(k + beta + 1, j) / (pochhammer(s + j + 1, j) * pochhammer(s + r + 2, j))


def mr_reduced_entries(r: int, k: int, alpha, beta) -> list[list]:
    """Entries of ``M_r(k)``: ``M_r(k,n)`` with the n-dependent factors removed."""
    size = 2 * r
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i < r:
                row.append(_A_without_n(r, j - i, k + i, alpha, beta))
            else:
                off = j - i + r
                sign = -1 if off % 2 else 1
                row.append(sign * _A_without_n(r, off, k + i - r, beta, alpha))
        rows.append(row)
    return rows


def scaling_diagonals(r: int, k: int, n: int, alpha, beta) -> tuple[list, list]:
    """Diagonals ``L`` and ``R`` with ``M_r(k) = diag(L) M_r(k,n) diag(R)``.

    ``L = ((base)_i)_{i<r}`` repeated for both blocks and
    ``R = (1/(base)_j)_{j<2r}`` with ``base = n + k + alpha + beta + 2``.
    """
    base = n + k + alpha + beta + 2
    left_block = [pochhammer(base, i) for i in range(r)]
    right = [1 / pochhammer(base, j) for j in range(2 * r)]
    return left_block + left_block, right


@dataclass(frozen=True)
class MrMatrix:
    r: int
    k: int
    n: int
    params: WeightParams
    entries: np.ndarray


def build_Mr(r: int, k: int, n: int, w: WeightParams) -> MrMatrix:
    if r < 1:
        raise ValueError("order r must be positive")
    if n < k:
        raise ValueError(f"need n >= k, got k={k}, n={n}")
    entries = np.array(mr_entries(r, k, n, w.alpha, w.beta), dtype=float)
    entries.setflags(write=False)
    return MrMatrix(r=r, k=k, n=n, params=w, entries=entries)


def det_Mr_closed(r: int, k: int, n: int, alpha, beta):
    """Closed-form determinant of ``M_r(k,n)``."""
    acc = 0 * (alpha + beta) + 1
    for j in range(1, r + 1):
        acc = acc * pochhammer(n + k + alpha + beta + j + 1, r) / pochhammer(2 * k + alpha + beta + 2 * r + j, r)
    return -acc if (r * r) % 2 else acc


def solve_B(r: int, k: int, n: int, w: WeightParams) -> np.ndarray:
    """First row of ``M_r(k,n)^{-1}``, i.e. the coefficients ``B_{l,1}`` then ``B_{l,2}``.

    Solved as ``M^T b = e_0`` with partial pivoting.
    """
    if n < k + 2 * r - 1:
        raise ValueError(f"need n >= k + 2r - 1, got r={r}, k={k}, n={n}")
    mat = build_Mr(r, k, n, w).entries
    rhs = np.zeros(2 * r)
    rhs[0] = 1.0
    try:
        lu, piv = sla.lu_factor(mat.T, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SingularMatrixError(str(exc)) from exc
    if np.any(np.abs(np.diag(lu)) <= np.finfo(float).eps * np.abs(mat).max() * 2 * r):
        raise SingularMatrixError(f"M_r(k,n) is numerically singular for r={r}, k={k}, n={n}")
    return sla.lu_solve((lu, piv), rhs)


def reconstruct_coefficient(r: int, k: int, n: int, w: WeightParams, d1_row, d2_row) -> float:
    """Recover ``fhat_{k,n}`` from derivative coefficients.

    ``d1_row[l]`` and ``d2_row[l]`` hold the degree-(n-r) coefficients at
    index ``k + l`` (l = 0..r-1) of the r-th derivatives in directions 1
    and 2, each in its shifted weight. The derivative relations carry a
    factor ``(-1)^r`` that the band system leaves on the right-hand side.
    """
    b = solve_B(r, k, n, w)
    rhs = np.concatenate([np.asarray(d1_row, dtype=float)[:r], np.asarray(d2_row, dtype=float)[:r]])
    value = float(b @ rhs)
    return -value if r % 2 else value
