from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from simplex_approx.coeff_relations import (
    ACoeffSpec, A_coeff, A_coeff_by_recursion, A_coeff_spec, SingularMatrixError, build_Mr,
    det_Mr_closed, mr_entries, mr_reduced_entries, reconstruct_coefficient, scaling_diagonals, solve_B,
)
from simplex_approx.exact_ident import RationalMatrix, det_exact
from simplex_approx.expansion import project_derivative
from simplex_approx.functions import random_polynomial_table
from simplex_approx.tri_basis import WeightParams

W0 = WeightParams(0, 0, 0)
rationals = st.fractions(min_value=Fraction(-9, 10), max_value=5, max_denominator=12)


def test_A_coeff_examples():
    assert A_coeff(3, 0, 2, 7, 0.3, 0.1) == 1
    assert A_coeff(1, 1, 0, 2, Fraction(0), Fraction(0)) == Fraction(2, 3)
    assert A_coeff(2, 3, 0, 4, 0.0, 0.0) == 0
    spec = ACoeffSpec(2, 1, 1, 4, 0.5, -0.5)
    assert A_coeff_spec(spec) == pytest.approx(A_coeff_by_recursion(2, 1, 1, 4, 0.5, -0.5), rel=1e-12)
    with pytest.raises(ValueError):
        ACoeffSpec(1, 2, 0, 0, 0.0, 0.0)


@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 6), rationals, rationals, st.data())
def test_A_coeff_closed_form_equals_recursion_exactly(r, k, extra, a, b, data):
    j = data.draw(st.integers(0, r))
    n = k + r + extra
    assert A_coeff(r, j, k, n, a, b) == A_coeff_by_recursion(r, j, k, n, a, b)


def test_build_Mr_examples():
    m = build_Mr(1, 0, 2, W0).entries
    np.testing.assert_allclose(m, [[1, 2 / 3], [1, -2 / 3]], rtol=1e-15)
    assert build_Mr(1, 3, 7, WeightParams(0.2, 0.4, 0)).entries[0, 0] == 1.0
    band = build_Mr(2, 0, 5, W0).entries
    assert band[0, 3] == 0.0
    with pytest.raises(ValueError):
        build_Mr(0, 0, 2, W0)


def test_det_examples():
    assert det_Mr_closed(1, 0, 2, Fraction(0), Fraction(0)) == Fraction(-4, 3)
    assert np.linalg.det(build_Mr(1, 0, 2, W0).entries) == pytest.approx(-4 / 3, rel=1e-12)
    w = WeightParams(0.5, -0.25, 1.0)
    lu = np.linalg.det(build_Mr(3, 2, 9, w).entries)
    assert lu == pytest.approx(det_Mr_closed(3, 2, 9, 0.5, -0.25), rel=1e-10)


@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 6), rationals, rationals)
def test_det_closed_form_exact(r, k, extra, a, b):
    n = k + 2 * r - 1 + extra
    det = det_exact(RationalMatrix.from_lists(mr_entries(r, k, n, a, b)))
    assert det == det_Mr_closed(r, k, n, a, b)


@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 6), rationals, rationals)
def test_scaling_diagonals_relate_matrices(r, k, n_extra, a, b):
    n = k + n_extra
    full = mr_entries(r, k, n, a, b)
    reduced = mr_reduced_entries(r, k, a, b)
    left, right = scaling_diagonals(r, k, n, a, b)
    for i in range(2 * r):
        for j in range(2 * r):
            assert left[i] * full[i][j] * right[j] == reduced[i][j]


def test_solve_B_example():
    np.testing.assert_allclose(solve_B(1, 0, 2, W0), [0.5, 0.5], rtol=1e-14)
    with pytest.raises(ValueError):
        solve_B(2, 0, 2, W0)


@given(st.integers(1, 3), st.integers(0, 5), st.integers(0, 10), rationals, rationals)
def test_solve_B_is_first_row_of_inverse(r, k, extra, a, b):
    n = k + 2 * r - 1 + extra
    w = WeightParams(float(a), float(b), 0.0)
    B = solve_B(r, k, n, w)
    M = build_Mr(r, k, n, w).entries
    e0 = np.zeros(2 * r)
    e0[0] = 1.0
    np.testing.assert_allclose(B @ M, e0, atol=1e-9 * max(1.0, np.abs(B).max()))


def test_solve_B_growth_measured():
    # |B_{l,i}| <= C (n/(k+1))^(l-1); record that a modest C covers r <= 3, n <= 40
    worst = 0.0
    for w in (W0, WeightParams(0.5, -0.25, 1.0)):
        for r in (1, 2, 3):
            for k in range(0, 8):
                for n in range(k + 2 * r - 1, 41):
                    B = solve_B(r, k, n, w)
                    for ell in range(1, r + 1):
                        scale = (n / (k + 1)) ** (ell - 1)
                        worst = max(worst, abs(B[ell - 1]) / scale, abs(B[r + ell - 1]) / scale)
    assert np.isfinite(worst) and worst <= 10.0


def test_singular_matrix_error_is_arithmetic():
    assert issubclass(SingularMatrixError, ArithmeticError)


@pytest.mark.parametrize("w", [W0, WeightParams(0.5, -0.25, 1.0), WeightParams(-0.5, -0.5, -0.5)])
@pytest.mark.parametrize("r", [1, 2])
def test_reconstruction_from_derivatives(w, r):
    tab = random_polynomial_table(w, 10, np.random.default_rng(7 + r))
    d1 = project_derivative(tab, 1, r)
    d2 = project_derivative(tab, 2, r)
    for n in range(2 * r - 1, 11):
        for k in range(0, n - 2 * r + 2):
            rows1 = [d1[k + l, n - r] if k + l <= n - r else 0.0 for l in range(r)]
            rows2 = [d2[k + l, n - r] if k + l <= n - r else 0.0 for l in range(r)]
            got = reconstruct_coefficient(r, k, n, w, rows1, rows2)
            assert got == pytest.approx(tab[k, n], abs=1e-9 * max(1.0, abs(tab[k, n])))


def test_reconstruction_example_degree6():
    w = WeightParams(0.5, -0.25, 1.0)
    tab = random_polynomial_table(w, 6, np.random.default_rng(11))
    r, k, n = 2, 0, 5
    d1 = project_derivative(tab, 1, r)
    d2 = project_derivative(tab, 2, r)
    got = reconstruct_coefficient(r, k, n, w, [d1[0, 3], d1[1, 3]], [d2[0, 3], d2[1, 3]])
    assert got == pytest.approx(tab[0, 5], abs=1e-9 * max(1.0, abs(tab[0, 5])))
