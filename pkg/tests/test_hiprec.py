import math

import mpmath
import numpy as np
import pytest
import sympy as sp
from scipy import special

from conftest import WEIGHTS
from simplex_approx import estimates as est
from simplex_approx import hiprec
from simplex_approx.functions import X, Y, get_specimen, symbolic_basis
from simplex_approx.tri_basis import WeightParams, basis_norm_h

W0 = WeightParams(0, 0, 0)


@pytest.mark.parametrize("a, b", [(0.0, 0.0), (-0.5, -0.5), (0.5, -0.25), (1.0, 2.5), (-0.5, 0.5)])
def test_gauss_rule_matches_scipy_and_integrates_exactly(a, b):
    m = 12
    t, v = hiprec.gauss_rule(m, a, b, 40)
    ref_t, ref_v = special.roots_jacobi(m, a, b)
    assert np.allclose([float(x) for x in t], ref_t, atol=1e-13)
    assert np.allclose([float(x) for x in v], ref_v / ref_v.sum(), rtol=1e-11)
    with mpmath.workdps(50):
        rows = hiprec._orthonormal_rows(m - 1, mpmath.mpf(a), mpmath.mpf(b), t)
        gram = rows.dot((rows * v[None, :]).T)
        off = max(abs(gram[i, j] - (i == j)) for i in range(m) for j in range(m))
    assert off < mpmath.mpf(10) ** -35


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        hiprec.degree_energies(X, W0, -1)
    with pytest.raises(ValueError):
        hiprec.degree_energies(X, W0, 3, dps=hiprec.MIN_DPS - 1)


@pytest.mark.parametrize("w", WEIGHTS)
def test_single_basis_element_energy_is_its_norm(w):
    k, n = 1, 3
    expr = symbolic_basis(k, n, *w.as_tuple())
    en = hiprec.degree_energies(expr, w, 5, dps=30, extra_nodes=4)
    energy = np.array([float(e) for e in en.degree])
    h = basis_norm_h(k, n, w)
    assert energy[n] == pytest.approx(h, rel=1e-14)
    assert np.all(np.abs(np.delete(energy, n)) <= 1e-25 * h)
    assert float(en.norm_sq) == pytest.approx(h, rel=1e-14)


@pytest.mark.parametrize("name", ["exp_x2y", "cos_pi_sum", "exp_xy"])
@pytest.mark.parametrize("w", WEIGHTS)
def test_energies_agree_with_double_route(name, w):
    spec = get_specimen(name)
    en = hiprec.degree_energies(spec.expr, w, 10, dps=30)
    tab, nsq = spec.expansion(w, 10)
    hi = np.array([float(e) for e in en.degree])
    assert np.max(np.abs(hi - tab.degree_energy())) <= 1e-13 * nsq
    assert float(en.norm_sq) == pytest.approx(nsq, rel=1e-13)


def test_tail_errors_resolve_below_double_precision():
    spec = get_specimen("exp_x2y")
    errs = [float(e) for e in hiprec.degree_energies(spec.expr, W0, 30, dps=60).tail_errors()]
    assert errs[-1] == 0.0
    assert all(e > 0 for e in errs[:-1])
    # geometric-like decay continues far below 1e-16
    assert errs[25] < 1e-30 and all(b < a for a, b in zip(errs[:-1], errs[1:-1]))


def test_tail_errors_stable_in_precision_and_nodes():
    expr = sp.cos(sp.pi * (X + Y))
    a = hiprec.degree_energies(expr, W0, 24, dps=50).tail_errors()
    b = hiprec.degree_energies(expr, W0, 24, dps=70, extra_nodes=40).tail_errors()
    # the last few degrees miss the dropped residual beyond N; callers expand a few degrees past the range
    for n in range(21):
        assert abs(a[n] - b[n]) <= 1e-8 * b[n]


def test_main_estimate_extended_precision_matches_double_where_resolved():
    spec = get_specimen("exp_x2y")
    fast = est.main_estimate_ratio(spec, W0, 1, range(3, 9))
    slow = est.main_estimate_ratio(spec, W0, 1, range(3, 9), dps=40)
    assert len(fast.clean_rows) == len(slow.clean_rows) == 6
    for f_row, s_row in zip(fast.rows, slow.rows):
        assert f_row.ratio == pytest.approx(s_row.ratio, rel=1e-6)


def test_main_estimate_extended_precision_needs_expression():
    with pytest.raises(ValueError):
        est.main_estimate_ratio(get_specimen("mode:1,3"), W0, 1, range(3, 5), dps=40)
