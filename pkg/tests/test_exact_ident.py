import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from simplex_approx import exact_ident as ei
from simplex_approx.exact_ident import (
    DetFamilySpec, ParameterDomainError, RationalMatrix, alternating_sum_pair, as_rational, band_minor_pair,
    build_M_general, closed_form_rhs, det_bareiss, det_exact, det_gauss, f_entry, factorial_ratio,
    family_det_pair, format_rational, laplace_check, laplace_terms, mr_as_family, mr_det_pair,
    mr_reduced_det_pair, mr_scaling_holds,
)

F = Fraction
rationals = st.fractions(min_value=-12, max_value=12, max_denominator=15)


def admissible_spec(r1, r2, s1, s2):
    try:
        return DetFamilySpec(r1, r2, s1, s2)
    except ParameterDomainError:
        return None


def test_as_rational_and_format():
    assert as_rational("3/6") == F(1, 2)
    assert as_rational(2) == F(2)
    assert as_rational(0.25) == F(1, 4)
    assert format_rational(F(-1, 6)) == "-1/6"
    assert format_rational(F(4)) == "4/1"
    with pytest.raises((ValueError, ZeroDivisionError)):
        as_rational("2/0")


def test_rational_matrix_basics():
    m = RationalMatrix.from_lists([[1, 2], [3, 4]])
    assert m.dim == 2 and m[1, 0] == 3
    assert m.submatrix([1], [0]).tolist() == [[3]]
    assert det_exact(RationalMatrix.identity(4)) == 1
    with pytest.raises(ValueError):
        RationalMatrix.from_lists([[1, 2], [3]])


@given(st.integers(1, 6), st.data())
def test_bareiss_equals_gauss(d, data):
    rows = [[data.draw(rationals) for _ in range(d)] for _ in range(d)]
    m = RationalMatrix.from_lists(rows)
    assert det_bareiss(m) == det_gauss(m)


def test_det_matches_permutation_expansion():
    import itertools
    rows = [[F(i * j + 1, i + j + 1) for j in range(4)] for i in range(4)]
    m = RationalMatrix.from_lists(rows)
    total = F(0)
    for perm in itertools.permutations(range(4)):
        inv = sum(1 for a in range(4) for b in range(a + 1, 4) if perm[a] > perm[b])
        prod = F(1)
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        total += -prod if inv % 2 else prod
    assert det_exact(m) == total


def test_singular_matrix_det_zero():
    m = RationalMatrix.from_lists([[1, 2, 3], [2, 4, 6], [F(1, 3), 0, 1]])
    assert det_bareiss(m) == 0 == det_gauss(m)


def test_f_entry_examples():
    assert f_entry(F(5, 3), F(7, 2), 3, 2, 2) == 1
    assert f_entry(F(2), F(3), 1, 0, 1) == F(1, 15)
    assert f_entry(F(1), F(1), 2, 0, 3) == 0


def test_general_matrix_example():
    spec = DetFamilySpec(1, 1, F(2), F(3))
    assert build_M_general(spec).tolist() == [[1, F(1, 15)], [1, F(-1, 10)]]
    m = build_M_general(DetFamilySpec(2, 1, F(1, 2), F(1, 3)))
    assert m.dim == 3


def test_closed_form_examples():
    spec = DetFamilySpec(1, 1, F(2), F(3))
    assert closed_form_rhs(spec) == F(-1, 6) == det_exact(build_M_general(spec))
    s1, s2 = F(7, 2), F(1, 5)
    assert closed_form_rhs(DetFamilySpec(1, 1, s1, s2)) == -1 / (s1 + s2 + 1)
    assert closed_form_rhs(DetFamilySpec(2, 2, F(3), F(4))) > 0


def test_spec_validation():
    with pytest.raises(ValueError):
        DetFamilySpec(0, 1, F(1), F(1))
    with pytest.raises(ParameterDomainError):
        DetFamilySpec(1, 1, F(0), F(0))  # (s1+s2)_1 in the first band denominator


@given(st.integers(1, 4), st.integers(1, 4), rationals, rationals)
def test_determinant_family_identity(r1, r2, s1, s2):
    spec = admissible_spec(r1, r2, s1, s2)
    if spec is None:
        return
    lhs, rhs = family_det_pair(spec)
    assert lhs == rhs


@pytest.mark.parametrize("z, u, v, expected", [
    (F(1, 2), 3, 1, F(5, 2) * F(7, 2)),
    (F(1, 2), 1, 3, 1 / (F(5, 2) * F(7, 2))),
    (F(4), 2, 2, 1),
])
def test_factorial_ratio(z, u, v, expected):
    assert factorial_ratio(z, u, v) == expected


def test_factorial_ratio_matches_integer_factorials():
    import math
    for z in range(0, 5):
        for u in range(0, 5):
            for v in range(0, 5):
                assert factorial_ratio(F(z), u, v) == F(math.factorial(z + u), math.factorial(z + v))


@pytest.mark.parametrize("r1, r2, s1, s2, ks", [
    (2, 1, F(2), F(3), [1]),
    (1, 1, F(5, 4), F(1, 3), [0]),
    (2, 2, F(2), F(3), [0, 1]),
    (3, 2, F(5, 2), F(1, 2), [1, 3]),
])
def test_band_minor_examples(r1, r2, s1, s2, ks):
    lhs, rhs = band_minor_pair(r1, r2, s1, s2, ks)
    assert lhs == rhs


@given(st.integers(1, 4), st.integers(1, 3), rationals, rationals, st.data())
def test_band_minor_identity(r1, r2, s1, s2, data):
    spec = admissible_spec(r1, r2, s1, s2)
    if spec is None:
        return
    ks = sorted(data.draw(st.sets(st.integers(0, r1 + r2 - 1), min_size=r2, max_size=r2)))
    try:
        lhs, rhs = band_minor_pair(r1, r2, s1, s2, ks)
    except ParameterDomainError:
        return
    assert lhs == rhs


def test_band_minor_validation():
    with pytest.raises(ValueError):
        band_minor_pair(2, 2, F(2), F(3), [1, 0])
    with pytest.raises(ValueError):
        band_minor_pair(2, 2, F(2), F(3), [0, 4])
    with pytest.raises(ValueError):
        band_minor_pair(2, 2, F(2), F(3), [0])


def test_alternating_sum_examples():
    assert alternating_sum_pair(1, 0, F(3), F(2, 7)) == (1, 1)
    assert alternating_sum_pair(1, 1, F(1), F(1)) == (2, 2)
    lhs, rhs = alternating_sum_pair(2, 3, F(3, 2), F(1, 2))
    assert lhs == rhs
    assert alternating_sum_pair(4, 1, F(1, 3), F(1, 5)) == (0, 0)
    with pytest.raises(ParameterDomainError):
        alternating_sum_pair(1, 2, F(0), F(1))


@given(st.integers(1, 3), st.integers(0, 6), rationals, rationals)
def test_alternating_sum_identity(r, m, a, b):
    try:
        lhs, rhs = alternating_sum_pair(r, m, a, b)
    except ParameterDomainError:
        return
    assert lhs == rhs


def test_laplace_examples():
    spec = DetFamilySpec(1, 1, F(2), F(3))
    assert laplace_check(spec)
    assert len(list(laplace_terms(spec))) == 2
    assert laplace_check(DetFamilySpec(2, 1, F(2), F(3)))
    assert len(list(laplace_terms(DetFamilySpec(2, 1, F(2), F(3))))) == 3
    spec = DetFamilySpec(2, 2, F(1, 2), F(3, 2))
    assert laplace_check(spec) and len(list(laplace_terms(spec))) == 6


def test_laplace_size_guard():
    with pytest.raises(ValueError):
        laplace_check(DetFamilySpec(5, 4, F(1, 2), F(1, 3)))


@given(st.integers(1, 4), st.integers(1, 4), rationals, rationals)
def test_laplace_property(r1, r2, s1, s2):
    if r1 + r2 > 6:
        return
    spec = admissible_spec(r1, r2, s1, s2)
    if spec is None:
        return
    assert laplace_check(spec)


@pytest.mark.parametrize("r, k, n, a, b", [
    (1, 0, 2, F(0), F(0)), (2, 1, 7, F(1, 3), F(-1, 4)), (3, 0, 9, F(0), F(0)),
])
def test_mr_determinant_examples(r, k, n, a, b):
    lhs, rhs = mr_det_pair(r, k, n, a, b)
    assert lhs == rhs
    if (r, k, n) == (1, 0, 2):
        assert lhs == F(-4, 3)


@given(st.integers(1, 3), st.integers(0, 4), st.integers(0, 8),
       st.sampled_from([F(0), F(1, 2), F(-1, 4), F(7, 3)]), st.sampled_from([F(0), F(1, 2), F(-1, 4), F(7, 3)]))
def test_mr_identities(r, k, extra, a, b):
    n = k + extra
    assert mr_det_pair(r, k, n, a, b)[0] == mr_det_pair(r, k, n, a, b)[1]
    assert mr_scaling_holds(r, k, n, a, b)
    red_lhs, red_rhs = mr_reduced_det_pair(r, k, a, b)
    assert red_lhs == red_rhs
    assert det_exact(build_M_general(mr_as_family(r, k, a, b))) == red_lhs


def test_random_spec_is_deterministic_and_admissible():
    a = ei.random_family_spec(random.Random(5), 3, 2)
    b = ei.random_family_spec(random.Random(5), 3, 2)
    assert a == b
    assert a.dim == 5


def test_record_and_json_line():
    rec = ei.record("family", {"r1": 1}, F(-1, 6), F(-1, 6))
    assert rec["equal"] and rec["lhs"] == "-1/6"
    assert ei.to_json_line(rec) == '{"equal": true, "kind": "family", "lhs": "-1/6", "r1": 1, "rhs": "-1/6"}'
