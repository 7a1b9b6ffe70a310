"""Extremal families: shapes, norms and epsilon handling."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hardylab.extremal import (
    DEFAULT_EPSILONS,
    EpsilonRangeError,
    FamilyUnavailableError,
    default_epsilons,
    extremal_family,
    make_extremal,
)
from hardylab.funcspace import AngularPattern, RadialProfile
from hardylab.norms import SpaceSpec, mixed_lebesgue_norm
from hardylab.operators import apply_conjugate_fractional_hardy, apply_fractional_hardy
from hardylab.sharpconst import TheoremCase, validate
from hardylab.special import unit_ball_volume, unit_sphere_area


def case(tid, **kw):
    return validate(TheoremCase(tid, kw))


class TestShapes:
    def test_t31_m1(self):
        f = make_extremal(case("T3.1", n=2, p=2, alpha=0), 0.01)
        assert f.radial == RadialProfile.power(1.0, -1.01, 1.0)
        assert f.angular == AngularPattern(1.0, 1.0)
        assert f(4.0) == pytest.approx(4.0**-1.01)

    def test_t31_m1_value(self):
        f = make_extremal(case("T3.1", n=2, p=2, alpha=0), 0.1)
        assert f(4.0, "pos") == pytest.approx(0.2176, abs=1e-4)

    def test_t32(self):
        f = make_extremal(case("T3.2", n=2, m=1, p=2, pt=2, lam=-0.125))
        assert f.radial == RadialProfile.power(1.0, -0.25)

    def test_t33_pattern_parity(self):
        odd = extremal_family(case("T3.3", n=3, lam=-0.25))
        even = extremal_family(case("T3.3", n=2, lam=-0.25))
        assert odd().angular == AngularPattern(1.0, -1.0) and not odd.degenerate
        assert even().angular == AngularPattern(1.0, 1.0) and even.degenerate

    def test_t43(self):
        f = make_extremal(case("T4.3", n=2, beta=1))
        assert f.radial == RadialProfile.indicator(0.0, 1.0)

    def test_t42_image(self):
        """Below the unit radius the image is I1 r^{beta - a}, beyond it
        I1 r^{beta - n}, with a = alpha1/(p1-1) and
        I1 = omega/(nu^{1-beta/n} (n - a))."""
        n, a1, p1, b = 2, 1.0, 2.0, 0.5
        f = make_extremal(case("T4.2", n=n, p1=p1, alpha1=a1, beta=b))
        a = a1 / (p1 - 1)
        I1 = unit_sphere_area(n) / unit_ball_volume(n) ** (1 - b / n) / (n - a)
        r = np.geomspace(1e-3, 1e3, 25)
        ref = I1 * np.where(r < 1, r ** (b - a), r ** (b - n))
        np.testing.assert_allclose(apply_fractional_hardy(f, n, b).radial(r), ref, rtol=1e-12)

    def test_t44_image(self):
        """P0 on r < 1 and P0 r^{-p1'(n+alpha1)/p2} beyond, with
        P0 = omega/nu^{1-beta/n} (1/(n+alpha1)) (p2/p1')."""
        n, b, p1 = 2, 0.5, 2.0
        c = case("T4.4", n=n, alpha=0, beta=b, p1=p1)
        p2, d = c["p2"], p1 / (p1 - 1)
        P0 = unit_sphere_area(n) / unit_ball_volume(n) ** (1 - b / n) / n * p2 / d
        r = np.geomspace(1e-3, 1e3, 25)
        ref = P0 * np.where(r < 1, 1.0, r ** (-d * n / p2))
        np.testing.assert_allclose(apply_conjugate_fractional_hardy(make_extremal(c), n, b).radial(r), ref, rtol=1e-12)

    def test_t45_image_beyond_one(self):
        n, b, a = 2, 0.5, 0.0
        c = case("T4.5", n=n, beta=b, alpha=a)
        eps = 0.1
        K = (b + n + a) / eps
        h = apply_conjugate_fractional_hardy(make_extremal(c, eps), n, b)
        R1 = unit_sphere_area(n) / unit_ball_volume(n) ** (1 - b / n) / (K - b)
        r = np.geomspace(1.0, 1e3, 9)
        np.testing.assert_allclose(h.radial(r), R1 * r ** (b - K), rtol=1e-12)

    def test_t5_power(self):
        f = make_extremal(case("T5.3U", n=2, p=2, q=2, alpha=0.5, lam=0.25, sigma=1))
        assert f.radial == RadialProfile.power(1.0, -0.5 - 1 + 0.25)

    def test_t31_m2_pair(self):
        fs = make_extremal(case("T3.1", n=2, m=2, p=2), 0.01)
        assert len(fs) == 2
        assert fs[0].radial.finite_breaks()[0] == pytest.approx(math.sqrt(0.5))


class TestNorms:
    @given(st.integers(1, 5), st.floats(1.2, 5.0), st.floats(1.1, 5.0), st.floats(0.0, 1.0), st.floats(0.01, 0.99))
    def test_t31_norm_agreement(self, n, p, pt, t, e):
        """||f_eps|| = omega^{1/pt}/(p eps)^{1/p} in the weighted space."""
        a = -n + 0.5 + t * ((p - 1) * n - 0.5 + n - 0.5) if (p - 1) * n > 0.5 else 0.0
        c = case("T3.1", n=n, p=p, pt=pt, alpha=a)
        fam = extremal_family(c)
        eps = e * fam.epsilon_max
        f = fam(eps)
        val = mixed_lebesgue_norm(f, SpaceSpec.lebesgue(n, p, pt, a))
        assert val == pytest.approx(unit_sphere_area(n) ** (1 / pt) / (p * eps) ** (1 / p), rel=1e-10)

    @given(st.integers(1, 4), st.floats(0.05, 0.9), st.floats(0.05, 0.9), st.floats(1.1, 4.0))
    def test_t44_norm(self, n, bt, pt, pt1):
        b = bt * n
        p1 = 1 + pt * (n / b - 1)
        c = case("T4.4", n=n, beta=b, p1=p1, pt1=pt1)
        f = make_extremal(c)
        val = mixed_lebesgue_norm(f, SpaceSpec.lebesgue(n, p1, pt1, 0.0))
        ref = unit_sphere_area(n) ** (1 / pt1) * ((p1 - 1) / (n - p1 * b)) ** (1 / p1)
        assert val == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("n,pt1", [(1, 2.0), (2, 2.0), (3, 1.5)])
    def test_t43_norm(self, n, pt1):
        f = make_extremal(case("T4.3", n=n, beta=0.5, pt1=pt1))
        val = mixed_lebesgue_norm(f, SpaceSpec.lebesgue(n, 1.0, pt1))
        assert val == pytest.approx(unit_sphere_area(n) ** (1 / pt1) / n, rel=1e-13)


class TestEpsilon:
    @pytest.mark.parametrize(
        "c",
        [
            ("T3.1", dict(n=2, p=2)),
            ("T3.1", dict(n=3, p=1.5, alpha=0.3)),
            ("T2.1", dict(m=2, n1=2, n2=3, p1=2, p2=3, pt1=2, pt2=2, q1=2, q2=2)),
        ],
    )
    def test_non_increasing_in_eps(self, c):
        fam = extremal_family(case(c[0], **c[1]))
        eps = default_epsilons(fam)
        r = np.geomspace(1.0001, 1e3, 40)
        vals = []
        for e in eps:
            f = fam(e)
            fs = f if isinstance(f, tuple) else (f,)
            vals.append(np.concatenate([g.radial(r) for g in fs]))
        # smaller eps gives pointwise larger values beyond r = 1
        for a, b in zip(vals[:-1], vals[1:]):
            assert np.all(b >= a)

    def test_t45_family_grows_with_eps(self):
        """r^{-(beta+n+alpha)/eps} decays faster as eps shrinks: the one
        family that is non-decreasing in eps beyond r = 1."""
        fam = extremal_family(case("T4.5", n=2, beta=0.5))
        r = np.geomspace(1.0001, 1e3, 40)
        vals = [fam(e).radial(r) for e in default_epsilons(fam)]
        for a, b in zip(vals[:-1], vals[1:]):
            assert np.all(b <= a)

    def test_range_errors(self):
        fam = extremal_family(case("T3.1", n=2, p=2))
        with pytest.raises(EpsilonRangeError):
            fam(0.0)
        with pytest.raises(EpsilonRangeError):
            fam(fam.epsilon_max)
        with pytest.raises(EpsilonRangeError):
            fam()
        with pytest.raises(EpsilonRangeError):
            extremal_family(case("T4.3", n=2, beta=1))(0.1)

    def test_epsilon_cap(self):
        # min(1, n/p' - alpha/p)
        assert extremal_family(case("T3.1", n=2, p=2)).epsilon_max == 1.0
        assert extremal_family(case("T3.1", n=1, p=1.5)).epsilon_max == pytest.approx(1 / 3)

    def test_default_sweep_clipped(self):
        fam = extremal_family(case("T3.1", n=1, p=1.2))
        eps = default_epsilons(fam)
        assert eps and all(e < fam.epsilon_max for e in eps)
        assert set(eps) <= set(DEFAULT_EPSILONS)
        assert default_epsilons(extremal_family(case("T4.3", n=2, beta=1))) == []

    def test_unavailable(self):
        with pytest.raises(FamilyUnavailableError):
            extremal_family(case("T4.1", n=2, beta=0.5, p1=2))
        with pytest.raises(FamilyUnavailableError):
            extremal_family(case("T3.2", n=2, m=1, p=2, lam=-0.5))
