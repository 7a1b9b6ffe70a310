"""Radial integration against scipy.integrate.quad."""

import math

import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from hardylab.funcspace import RadialProfile
from hardylab.quadrature import (
    DEFAULT_GRID,
    DivergenceError,
    QuadGrid,
    antiderivative_profile,
    cumulative_radial,
    integrate_abs_power,
    integrate_abs_power_over,
    integrate_quarter_disk,
    integrate_radial,
    integrate_radial_numeric,
    tail_radial,
)

from strategies import profiles


def quad_segments(fn, prof, a=0.0, b=math.inf):
    """Oracle: adaptive quadrature of fn(terms, r) on each segment of ``prof``
    inside (a, b), with the segment's own terms so breakpoints are exact."""
    tot = 0.0
    for lo, hi, terms in prof.segments:
        lo2, hi2 = max(lo, a), min(hi, b)
        if lo2 >= hi2 or not terms:
            continue
        val, _ = integrate.quad(lambda x: fn(terms, x), lo2, hi2, epsabs=1e-14, epsrel=1e-12, limit=200)
        tot += val
    return tot


def seg(terms, x):
    return sum(c * x**s * math.log(x) ** k for c, s, k in terms)


@given(profiles(logs=True))
def test_integrate_radial_matches_quad(g):
    ref = quad_segments(seg, g)
    assert integrate_radial(g, 0.0) == pytest.approx(ref, rel=1e-8, abs=1e-10)


@given(profiles(), st.floats(min_value=0.1, max_value=30.0))
def test_cumulative_plus_tail_is_total(g, r):
    tot = integrate_radial(g, 0.0)
    assert cumulative_radial(g, 0.0, r) + tail_radial(g, 0.0, r) == pytest.approx(tot, rel=1e-10, abs=1e-10)


@given(profiles(logs=True), st.floats(min_value=0.05, max_value=50.0))
def test_antiderivative_profiles(g, r):
    ref0 = quad_segments(seg, g, 0.0, r)
    refi = quad_segments(seg, g, r, math.inf)
    G0 = antiderivative_profile(g, 0.0, "zero")
    Gi = antiderivative_profile(g, 0.0, "inf")
    assert G0(r) == pytest.approx(ref0, rel=1e-8, abs=1e-10)
    assert Gi(r) == pytest.approx(refi, rel=1e-8, abs=1e-10)


@given(profiles(), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_abs_power_matches_quad(g, p):
    # weight r^{p-1}: head needs p s + p > 0 and tail p s + p < 0
    w = p - 1.0
    ref = quad_segments(lambda t, x: abs(seg(t, x)) ** p * x**w, g)
    assert integrate_abs_power(g, p, w) == pytest.approx(ref, rel=1e-7, abs=1e-12)


def test_abs_power_sign_change_and_close_exponents():
    """Terms of nearly equal exponent cannot be separated at the ends; the
    log-domain fallback must still agree with quad."""
    g = RadialProfile.from_segments([0, 1, math.inf], [[(1.0, -0.2, 0), (-0.5, 0.3, 0)], [(1.0, -2.0, 0), (-0.9, -2.0 - 1e-9, 0)]])
    ref = quad_segments(lambda t, x: abs(seg(t, x)) ** 2 * x, g)
    assert integrate_abs_power(g, 2.0, 1.0) == pytest.approx(ref, rel=1e-7)


def test_abs_power_over_interval():
    g = RadialProfile.power(1.0, -0.5)
    # int_1^4 r^{-1} r dr = 3
    assert integrate_abs_power_over(g, 2.0, 1.0, (1.0, 4.0)) == pytest.approx(3.0, rel=1e-13)


def test_divergence_reports_endpoint():
    with pytest.raises(DivergenceError) as e:
        integrate_radial(RadialProfile.power(1.0, -1.0), 0.0, (0.0, 1.0))
    assert e.value.endpoint is not None
    with pytest.raises(DivergenceError):
        integrate_abs_power(RadialProfile.power(1.0, -0.4), 2.0, 1.0)


@pytest.mark.parametrize("a", [1e-14, 1e-10, -1e-12])
def test_definite_integral_near_log_exponent(a):
    # int_r^1 rho^{a-1} = (1 - r^a)/a, evaluated stably
    g = RadialProfile.power(1.0, a - 1.0, 0.0, 1.0)
    r = 1e-3
    ref = -math.expm1(a * math.log(r)) / a
    assert integrate_radial(g, 0.0, (r, 1.0)) == pytest.approx(ref, rel=1e-13)


def test_log_boundary_antiderivative():
    # int_1^r rho^{-1} drho = ln r
    g = RadialProfile.power(1.0, -1.0, 1.0)
    G = antiderivative_profile(g, 0.0)
    assert G(math.e**2) == pytest.approx(2.0, rel=1e-14)
    assert G.has_logs


@given(profiles())
def test_numeric_path_agrees_with_exact(g):
    b = 10.0
    assert integrate_radial_numeric(g, 0.0, (0.0, b)) == pytest.approx(integrate_radial(g, 0.0, (0.0, b)), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_quarter_disk_against_dblquad(n):
    g1 = RadialProfile.from_segments([0, 0.5, math.inf], [[(1.0, -0.3, 0)], [(2.0, -1.5, 0)]])
    g2 = RadialProfile.power(1.0, 0.4, 0.0, 0.8)
    r = 1.3
    e = n - 1
    val = integrate_quarter_disk(g1, g2, r, n)

    def g1v(x):
        return x**-0.3 if x < 0.5 else 2.0 * x**-1.5

    def inner(r1):
        # g2(r rho2) = (r rho2)^0.4 up to rho2 = 0.8 / r, zero beyond
        top = min(math.sqrt(max(0.0, 1 - r1 * r1)), 0.8 / r)
        v, _ = integrate.quad(lambda r2: (r * r2) ** 0.4 * r2**e, 0, top, epsabs=0, epsrel=1e-13)
        return g1v(r * r1) * r1**e * v

    cut = 0.5 / r
    ref = sum(integrate.quad(inner, a, b, epsabs=0, epsrel=1e-12, limit=200, points=[math.sqrt(1 - (0.8 / r) ** 2)] if a < math.sqrt(1 - (0.8 / r) ** 2) < b else None)[0] for a, b in ((0, cut), (cut, 1)))
    assert val == pytest.approx(ref, rel=1e-8)


def test_quarter_disk_axis_divergence():
    with pytest.raises(DivergenceError):
        integrate_quarter_disk(RadialProfile.power(1.0, -2.0), RadialProfile.constant(), 1.0, 1)


def test_grid_validation():
    with pytest.raises(ValueError):
        QuadGrid(points_per_decade=4)
    with pytest.raises(ValueError):
        QuadGrid(r_min=1.0, r_max=0.5)
    g = DEFAULT_GRID.doubled()
    assert g.points_per_decade == 2 * DEFAULT_GRID.points_per_decade
    nodes = DEFAULT_GRID.nodes()
    assert nodes[0] == pytest.approx(1e-6) and nodes[-1] == pytest.approx(1e6)
