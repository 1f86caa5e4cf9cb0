import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from simplex_approx import _accel, _kernels

exps = st.floats(min_value=-0.9, max_value=4.0, allow_nan=False)


def loop_forms():
    """The loop kernels both as compiled (when numba is active) and as plain Python."""
    forms = [("loops", _kernels._hjacobi_table_loops, _kernels._basis_table_loops)]
    py_h = getattr(_kernels._hjacobi_table_loops, "py_func", None)
    py_b = getattr(_kernels._basis_table_loops, "py_func", None)
    if py_h is not None:
        forms.append(("python", py_h, py_b))
    return forms


@given(st.integers(0, 20), exps, exps, st.integers(0, 1000))
def test_hjacobi_loops_equal_numpy(nmax, a, b, seed):
    rng = np.random.default_rng(seed)
    s = rng.random(13)
    d = (2 * rng.random(13) - 1) * s
    ref = _kernels._hjacobi_table_numpy(nmax, a, b, d, s)
    for _, h, _ in loop_forms():
        np.testing.assert_allclose(h(nmax, a, b, d, s), ref, rtol=1e-13, atol=1e-13)


@given(st.integers(0, 12), exps, exps, exps, st.integers(0, 1000))
def test_basis_loops_equal_numpy(nmax, a, b, g, seed):
    rng = np.random.default_rng(seed)
    x, y = rng.random(11) / 2, rng.random(11) / 2
    x[0] = y[0] = 0.0  # apex
    ref = _kernels._basis_table_numpy(nmax, a, b, g, x, y)
    assert np.all(np.isfinite(ref))
    for _, _, bt in loop_forms():
        np.testing.assert_allclose(bt(nmax, a, b, g, x, y), ref, rtol=1e-12, atol=1e-13)


def test_homogeneous_form_scales():
    # s^n P_n(d/s) is homogeneous of degree n in (d, s)
    d, s = np.array([0.3, -0.2]), np.array([0.5, 0.9])
    t1 = _kernels.hjacobi_table(6, 0.4, 1.5, d, s)
    t2 = _kernels.hjacobi_table(6, 0.4, 1.5, 2 * d, 2 * s)
    np.testing.assert_allclose(t2, t1 * (2.0 ** np.arange(7))[:, None], rtol=1e-13)


def test_backend_reports_flag():
    assert _accel.backend() == ("numba" if _accel.USE_NUMBA else "numpy")


@pytest.mark.parametrize("raw, expected", [("", None), ("4", 4), ("0", 1), ("x", None)])
def test_thread_cap_parsing(monkeypatch, raw, expected):
    monkeypatch.setenv("SIMPLEX_APPROX_THREADS", raw)
    assert _accel.thread_cap() == expected
    _accel.apply_thread_cap()


SNIPPET = """
import numpy as np, sys
from simplex_approx import _accel
from simplex_approx.tri_basis import WeightParams, basis_table
rng = np.random.default_rng(0)
x, y = rng.random(50) / 2, rng.random(50) / 2
np.save(sys.argv[1], basis_table(10, WeightParams(0.5, -0.25, 1.0), x, y))
print(_accel.backend())
"""


def test_numpy_fallback_matches_default_backend(tmp_path):
    results = {}
    for flag in ("0", "1"):
        env = dict(os.environ, SIMPLEX_APPROX_DISABLE_JIT=flag)
        path = tmp_path / f"table_{flag}.npy"
        proc = subprocess.run([sys.executable, "-c", SNIPPET, str(path)], env=env,
                              capture_output=True, text=True, check=True)
        results[flag] = (proc.stdout.strip(), np.load(path))
    assert results["1"][0] == "numpy"
    assert results["0"][0] == ("numba" if _accel.HAVE_NUMBA else "numpy")
    np.testing.assert_allclose(results["0"][1], results["1"][1], rtol=1e-12, atol=1e-14)
