"""Invariant battery behind the ``selfcheck`` command."""

from __future__ import annotations

import math

import numpy as np

from .funcspace import AngularPattern, MixedFunction, RadialProfile
from .norms import SpaceSpec, herz_norm, mixed_lebesgue_norm, morrey_herz_norm
from .operators import apply_fractional_hardy, apply_spherical_hardy, fractional_hardy_numeric
from .quadrature import DEFAULT_GRID, integrate_abs_power
from .sharpconst import TheoremCase, sharp_constant, validate
from .special import beta, gamma, unit_ball_volume, unit_sphere_area
from .verify import VerifyConfig, measure_ratio
from .extremal import make_extremal


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def run_checks(grid=None, seed=0):
    """List of (name, ok, detail) tuples."""
    grid = grid or DEFAULT_GRID
    rng = np.random.default_rng(seed)
    out = []

    def add(name, err, tol):
        out.append((name, bool(err <= tol), f"err={err:.3g} tol={tol:g}"))

    z = rng.uniform(0.05, 30.0, size=(200, 2))
    add("beta-gamma identity", max(_rel(beta(a, b), gamma(a) * gamma(b) / gamma(a + b)) for a, b in z), 1e-10)
    add("omega_n = n nu_n", max(_rel(unit_sphere_area(n), n * unit_ball_volume(n)) for n in range(1, 21)), 1e-12)

    # mixed norms with equal exponents against the radial integral
    f = MixedFunction(RadialProfile.from_segments([0, 1, math.inf], [[(1.0, -0.3, 0)], [(2.0, -2.5, 0)]]), AngularPattern())
    for n, p in ((2, 2.0), (3, 1.5)):
        mixed = mixed_lebesgue_norm(f, SpaceSpec.lebesgue(n, p, p), grid)
        classical = (unit_sphere_area(n) * integrate_abs_power(f.radial, p, n - 1.0, grid)) ** (1 / p)
        add(f"L^p_rad L^p_ang = L^p (n={n})", _rel(mixed, classical), 1e-12)
    hz = herz_norm(f, SpaceSpec.herz(2, 0.0, 2.0, 2.0, 2.0), grid=grid)
    add("Herz(alpha=0, q=p) = Lebesgue", _rel(hz, mixed_lebesgue_norm(f, SpaceSpec.lebesgue(2, 2.0, 2.0), grid)), 1e-8)
    h2 = herz_norm(f, SpaceSpec.herz(2, 0.3, 1.5, 2.0, 3.0), grid=grid)
    mh = morrey_herz_norm(f, SpaceSpec.morrey_herz(2, 0.3, 1.5, 0.0, 2.0, 3.0), grid=grid)
    add("Morrey-Herz(lambda=0) = Herz", _rel(mh, h2), 1e-12)

    cfg = VerifyConfig(grid=grid, battery=0)
    c = validate(TheoremCase("T3.3", {"lam": -0.25}))
    add("T3.3 eigen-identity", _rel(measure_ratio(c, make_extremal(c), cfg), 4.0 / 3.0), 1e-6)
    c = validate(TheoremCase("T3.2", {"n": 2, "m": 1, "p": 2, "pt": 2, "lam": -0.125}))
    add("T3.2 eigenfunction", _rel(measure_ratio(c, make_extremal(c), cfg), 8.0 / 7.0), 1e-8)
    lit = apply_spherical_hardy(make_extremal(validate(TheoremCase("T3.3", {"lam": -0.25}))), 3)
    add("literal ball average kills the odd pattern", float(np.max(np.abs(lit.radial(np.geomspace(1e-3, 1e3, 50))))), 1e-14)

    chi = MixedFunction(RadialProfile.indicator(0.0, 1.0), AngularPattern())
    r = np.geomspace(1e-2, 1e2, 50)
    add(
        "fractional Hardy exact vs quadrature",
        float(np.max(np.abs(apply_fractional_hardy(chi, 2, 1.0).radial(r) / fractional_hardy_numeric(chi, 2, 1.0, r, grid) - 1))),
        1e-8,
    )

    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(1, 6))
        p = float(rng.uniform(1.2, 5.0))
        a = float(rng.uniform(-n + 0.1, (p - 1) * n - 0.1))
        case = validate(TheoremCase("T3.1", {"n": n, "p": p, "pt": 2.0, "alpha": a}))
        worst = max(worst, _rel(sharp_constant(case), p * n / (p * n - n - a)))
    add("T3.1 m=1 reduces to pn/(pn-n-alpha)", worst, 1e-12)
    c = validate(TheoremCase("T3.2", {"n": 3, "p": 2.5, "pt": 2.0, "lam": -0.3}))
    add("T3.2 m=1 equals 1/(1+lambda)", _rel(sharp_constant(c), 1 / 0.7), 1e-12)
    return out
