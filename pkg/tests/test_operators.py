"""Hardy-type operators against direct quadrature and eigen-identities."""

import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st
from scipy import integrate

from hardylab.funcspace import AngularPattern, MixedFunction, RadialProfile
from hardylab.operators import (
    OperatorError,
    OperatorSpec,
    WeightFunction,
    apply_conjugate_fractional_hardy,
    apply_fractional_hardy,
    apply_mlinear_hardy,
    apply_operator,
    apply_product_hardy,
    apply_ray_average,
    apply_spherical_hardy,
    apply_weighted_average,
    fractional_hardy_numeric,
)
from hardylab.quadrature import DivergenceError
from hardylab.special import unit_ball_volume, unit_sphere_area

from strategies import profiles, sample_radii

RADII = np.geomspace(1e-2, 1e2, 23)


def seg_quad(g, a, b, weight):
    """Oracle: int_a^b g(rho) weight(rho) drho, split at the breakpoints."""
    pts = [a] + [x for x in g.finite_breaks() if a < x < b] + [b]
    tot = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        mid = math.sqrt(lo * hi) if lo > 0 and hi < math.inf else (hi / 2 if lo == 0 else 2 * lo)
        terms = g.segments[int(g.segment_index(mid))][2]
        fn = lambda x: sum(c * x**s * math.log(x) ** k for c, s, k in terms) * weight(x)
        tot += integrate.quad(fn, lo, hi, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
    return tot


class TestSphericalHardy:
    @given(st.floats(min_value=-0.9, max_value=3.0), st.integers(1, 5), st.floats(0.1, 5.0))
    def test_power_eigenvalue(self, s, n, c):
        f = MixedFunction.radial_power(c, s * n)
        h = apply_spherical_hardy(f, n)
        np.testing.assert_allclose(h.radial(RADII), n / (n + s * n) * c * RADII ** (s * n), rtol=1e-12)

    @given(profiles(), st.integers(1, 4))
    def test_against_quadrature(self, g, n):
        f = MixedFunction(g, AngularPattern(1.0, 0.5))
        h = apply_spherical_hardy(f, n)
        for r in sample_radii(g, 7):
            ref = 0.75 * n * r**-n * seg_quad(g, 0.0, r, lambda x: x ** (n - 1))
            assert h.radial(r) == pytest.approx(ref, rel=1e-8, abs=1e-12)

    def test_odd_pattern_is_annihilated(self):
        f = MixedFunction.radial_power(1.0, -0.75, pattern=(1.0, -1.0))
        h = apply_spherical_hardy(f, 3)
        assert h.radial.is_zero
        assert np.max(np.abs(h.radial(RADII))) == 0.0

    def test_ray_average_keeps_pattern(self):
        f = MixedFunction.radial_power(1.0, -0.75, pattern=(1.0, -1.0))
        h = apply_ray_average(f, 3)
        assert h.angular == f.angular
        np.testing.assert_allclose(h.radial(RADII), RADII**-0.75 / (1 - 0.25), rtol=1e-12)

    def test_dimension_checked(self):
        with pytest.raises(OperatorError):
            apply_spherical_hardy(MixedFunction.radial_power(), 0)


class TestFractional:
    @pytest.mark.parametrize("n,beta", [(1, 0.5), (2, 1.0), (3, 0.7), (3, 2.5)])
    def test_ball_indicator_closed_form(self, n, beta):
        """nu^{beta/n} r^beta inside the unit ball, nu^{beta/n} r^{beta-n} outside."""
        chi = MixedFunction(RadialProfile.indicator(0.0, 1.0), AngularPattern())
        closed = unit_ball_volume(n) ** (beta / n) * np.where(RADII < 1, RADII**beta, RADII ** (beta - n))
        np.testing.assert_allclose(apply_fractional_hardy(chi, n, beta).radial(RADII), closed, rtol=1e-13)
        np.testing.assert_allclose(fractional_hardy_numeric(chi, n, beta, RADII), closed, rtol=1e-9)

    @given(profiles(), st.integers(1, 3), st.floats(0.05, 0.95))
    def test_against_quadrature(self, g, n, bfrac):
        beta = bfrac * n
        f = MixedFunction(g, AngularPattern())
        h = apply_fractional_hardy(f, n, beta)
        fac = unit_sphere_area(n) * unit_ball_volume(n) ** (beta / n - 1)
        for r in sample_radii(g, 5):
            ref = fac * r ** (beta - n) * seg_quad(g, 0.0, r, lambda x: x ** (n - 1))
            assert h.radial(r) == pytest.approx(ref, rel=1e-8, abs=1e-12)

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    @given(profiles(), st.integers(1, 3), st.one_of(st.just(0.0), st.floats(0.0, 1e-6), st.floats(0.0, 0.95)))
    def test_conjugate_against_quadrature(self, g, n, bfrac):
        beta = bfrac * min(n, 1.1)
        f = MixedFunction(g, AngularPattern())
        h = apply_conjugate_fractional_hardy(f, n, beta)
        fac = unit_sphere_area(n) * unit_ball_volume(n) ** (beta / n - 1)
        for r in sample_radii(g, 5):
            ref = fac * seg_quad(g, r, math.inf, lambda x: x ** (beta - 1))
            assert h.radial(r) == pytest.approx(ref, rel=1e-8, abs=1e-12)

    @pytest.mark.parametrize("s", [1.4e-14, -3e-9, 5e-7])
    def test_conjugate_near_flat_piece(self, s):
        # int_r^1 rho^(s-1) drho is nearly -ln r; r^s/s against a constant cancels
        g = RadialProfile.from_segments([0, 1, math.inf], [[(1.0, s, 0)], [(1.0, -2.0, 0)]])
        h = apply_conjugate_fractional_hardy(MixedFunction(g, AngularPattern()), 1, 0.0)
        r = np.array([1e-300, 1e-5, 0.3, 0.9])
        exact = -np.expm1(s * np.log(r)) / s + 0.5
        np.testing.assert_allclose(h.radial(r), exact, rtol=1e-13)

    def test_beta_range(self):
        f = MixedFunction.radial_power()
        with pytest.raises(OperatorError):
            apply_fractional_hardy(f, 2, 2.0)
        with pytest.raises(OperatorError):
            apply_fractional_hardy(f, 2, 0.0)
        # beta = 0 is allowed for the conjugate operator
        apply_conjugate_fractional_hardy(MixedFunction.radial_power(1.0, -3.0, 1.0), 2, 0.0)


class TestMultilinear:
    @pytest.mark.parametrize("n,a,b", [(1, -0.3, 0.2), (2, -0.5, -0.5), (3, 0.4, -1.0)])
    def test_power_pair_eigenvalue(self, n, a, b):
        """Product of powers: omega^2/nu_{2n} B(A/2, B/2) / (2 (A + B)) with
        A = a + n, B = b + n."""
        A, B = a + n, b + n
        lam = unit_sphere_area(n) ** 2 / unit_ball_volume(2 * n) * sp.beta(A / 2, B / 2) / (2 * (A + B))
        fs = [MixedFunction.radial_power(1.0, a), MixedFunction.radial_power(1.0, b)]
        h = apply_mlinear_hardy(fs, n)
        r = np.geomspace(1e-3, 1e3, 13)
        np.testing.assert_allclose(h.radial(r), lam * r ** (a + b), rtol=1e-8)

    def test_m1_is_spherical(self):
        f = MixedFunction.radial_power(1.0, -0.5, 0.0, 2.0)
        assert apply_mlinear_hardy([f], 2).radial == apply_spherical_hardy(f, 2).radial

    def test_m3_rejected(self):
        f = MixedFunction.radial_power()
        with pytest.raises(OperatorError):
            apply_mlinear_hardy([f, f, f], 2)

    def test_product_factorwise(self):
        g1, g2 = RadialProfile.power(1.0, -0.5), RadialProfile.indicator(0.0, 1.0)
        h1, h2 = apply_product_hardy([g1, g2], [2, 3])
        np.testing.assert_allclose(h1(RADII), RADII**-0.5 / 0.75, rtol=1e-12)
        np.testing.assert_allclose(h2(RADII), np.where(RADII < 1, 1.0, RADII**-3.0), rtol=1e-12)


class TestWeightedAverages:
    @given(st.floats(-1.5, 2.0), st.floats(-0.5, 3.0), st.floats(0.1, 3.0))
    def test_U_eigenvalue(self, s, sigma, c):
        if s + sigma <= -0.9:
            return
        f = MixedFunction.radial_power(1.0, s)
        h = apply_weighted_average(f, WeightFunction.power(c, sigma), 2, "U")
        np.testing.assert_allclose(h.radial(RADII), c / (s + sigma + 1) * RADII**s, rtol=1e-11)

    @given(st.floats(-3.0, 0.5), st.floats(-0.5, 3.0), st.integers(1, 3))
    def test_V_eigenvalue(self, s, sigma, n):
        a = -s - n + sigma + 1
        if a <= 0.1:
            return
        f = MixedFunction.radial_power(1.0, s)
        h = apply_weighted_average(f, WeightFunction.power(1.0, sigma), n, "V")
        np.testing.assert_allclose(h.radial(RADII), RADII**s / a, rtol=1e-11)

    def test_U_against_quadrature(self, two_piece):
        psi = WeightFunction.power(2.0, 0.5)
        h = apply_weighted_average(two_piece, psi, 2, "U")
        g = two_piece.radial
        for r in (0.3, 1.0, 2.0, 17.0):
            ref = integrate.quad(lambda t: float(g(t * r)) * 2 * t**0.5, 0, 1, points=[1 / r] if r > 1 else None, epsrel=1e-12)[0]
            assert h.radial(r) == pytest.approx(ref, rel=1e-9)

    def test_tabulated_matches_power(self, two_piece):
        t = np.linspace(0.0, 1.0, 5)
        tab = WeightFunction.tabulated(t, t)
        pw = WeightFunction.power(1.0, 1.0)
        for variant in ("U", "V"):
            f = MixedFunction(RadialProfile.power(1.0, -2.5, 1.0), AngularPattern()) if variant == "V" else two_piece
            a = apply_weighted_average(f, tab, 2, variant).radial
            b = apply_weighted_average(f, pw, 2, variant).radial
            r = np.geomspace(0.05, 50, 9)
            np.testing.assert_allclose(a(r), b(r), rtol=2e-3)

    def test_moment(self):
        assert WeightFunction.power(3.0, 1.0).moment(0.5) == pytest.approx(3.0 / 2.5)
        tab = WeightFunction.tabulated([0.0, 1.0], [1.0, 1.0])
        assert tab.moment(1.0) == pytest.approx(0.5)
        with pytest.raises(DivergenceError):
            WeightFunction.power(1.0, 0.0).moment(-1.0)

    def test_divergent_moment_raises(self):
        with pytest.raises(DivergenceError, match="moment"):
            apply_weighted_average(MixedFunction.radial_power(1.0, -1.5), WeightFunction.power(1.0, 0.0), 2, "U")

    def test_weight_validation(self):
        with pytest.raises(OperatorError):
            WeightFunction.power(1.0, -1.0)
        with pytest.raises(OperatorError):
            WeightFunction.tabulated([0.5, 0.2], [1.0, 1.0])
        with pytest.raises(OperatorError):
            WeightFunction.tabulated([0.0, 1.0], [1.0, -1.0])


class TestOperatorSpec:
    def test_dispatch(self):
        f = MixedFunction.radial_power(1.0, -0.5)
        assert apply_operator(OperatorSpec("spherical", 2), f).radial == apply_spherical_hardy(f, 2).radial
        assert apply_operator(OperatorSpec("fractional", 2, beta=1.0), f).radial == apply_fractional_hardy(f, 2, 1.0).radial
        u = apply_operator(OperatorSpec("U", 2, psi=WeightFunction.power()), f)
        assert u.radial(1.0) == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "kw",
        [dict(kind="nope", n=2), dict(kind="fractional", n=2), dict(kind="U", n=2), dict(kind="product", n=2), dict(kind="ray", n=0)],
    )
    def test_invalid(self, kw):
        with pytest.raises(OperatorError):
            OperatorSpec(**kw)
