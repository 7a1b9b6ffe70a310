import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardylab import _kernels, _pykernels

ck = pytest.importorskip("hardylab._ckernels")


@st.composite
def tables(draw):
    S = draw(st.integers(1, 4))
    K = draw(st.integers(1, 3))
    inner = sorted(draw(st.lists(st.floats(1e-2, 1e2), min_size=S - 1, max_size=S - 1, unique=True)))
    breaks = np.array([0.0] + inner + [np.inf])
    c = np.array(draw(st.lists(st.floats(-5, 5), min_size=S * K, max_size=S * K))).reshape(S, K)
    e = np.array(draw(st.lists(st.floats(-3, 3), min_size=S * K, max_size=S * K))).reshape(S, K)
    k = np.array(draw(st.lists(st.integers(0, 2), min_size=S * K, max_size=S * K)), dtype=np.int64).reshape(S, K)
    return breaks, c, e, k


@given(tables(), st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=20))
def test_eval_backends_agree(tab, xs):
    breaks, c, e, k = tab
    x = np.array(xs)
    a = ck.eval_piecewise(x, breaks, c, e, k)
    b = _pykernels.eval_piecewise(x, breaks, c, e, k)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)


@given(tables(), st.floats(1.0, 4.0), st.floats(-1.5, 2.0))
def test_abs_power_backends_agree(tab, p, w):
    _, c, e, k = tab
    S = c.shape[0]
    edges = np.geomspace(0.05, 20.0, 3 * S + 1)
    seg = np.arange(3 * S) % S
    x, wq = np.polynomial.legendre.leggauss(8)
    a = ck.abs_power_cells(edges[:-1], edges[1:], seg, x, wq, c, e, k, p, w)
    b = _pykernels.abs_power_cells(edges[:-1], edges[1:], seg, x, wq, c, e, k, p, w)
    assert a == pytest.approx(b, rel=1e-11, abs=1e-300)


def test_abs_power_extreme_range_finite():
    # the profile underflows while r^(w+1) overflows; both must stay finite
    c = np.array([[-190.039, 215.88]])
    e = np.array([[-3.06028, -3.0]])
    k = np.zeros((1, 2), dtype=np.int64)
    edges = np.geomspace(1e90, 1e115, 40)
    x, wq = np.polynomial.legendre.leggauss(10)
    seg = np.zeros(edges.size - 1, dtype=np.int64)
    vals = [
        mod.abs_power_cells(edges[:-1], edges[1:], seg, x, wq, c, e, k, 1.5, 2.4)
        for mod in (ck, _pykernels)
    ]
    assert all(np.isfinite(v) and v >= 0 for v in vals)
    assert vals[0] == pytest.approx(vals[1], rel=1e-10)


def test_single_power_cell_exact():
    # int_1^e r^2 dr = (e^3 - 1)/3
    c = np.array([[1.0]])
    e = np.array([[1.0]])
    k = np.zeros((1, 1), dtype=np.int64)
    x, wq = np.polynomial.legendre.leggauss(12)
    for mod in (ck, _pykernels):
        v = mod.abs_power_cells(np.array([1.0]), np.array([np.e]), np.array([0]), x, wq, c, e, k, 1.0, 1.0)
        assert v == pytest.approx((np.e**3 - 1) / 3, rel=1e-13)


def test_backend_selection():
    forced = os.environ.get("HARDYLAB_PURE", "") in ("1", "true", "yes")
    assert _kernels.BACKEND == ("python" if forced else "cython")
    env = dict(os.environ, HARDYLAB_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "from hardylab import _kernels; print(_kernels.BACKEND)"],
        capture_output=True, text=True, env=env,
    )
    assert out.stdout.strip() == "python"
