import csv
import io
import json
import math

import numpy as np
import pytest

from hardylab.funcspace import AngularPattern, MixedFunction, RadialProfile
from hardylab.sharpconst import EQUIVALENCE_WINDOW, ConstraintViolation, TheoremCase, sharp_constant, validate
from hardylab.verify import (
    CSV_COLUMNS,
    VerifyConfig,
    VerifyError,
    ZeroSourceError,
    extrapolate,
    measure_ratio,
    param_hash,
    random_admissible,
    sweep_and_extrapolate,
    verify_theorem,
)

CASES = [
    ("T2.1", dict(m=2, n1=2, n2=3, p1=2, p2=3, pt1=2, pt2=2, q1=2, q2=2)),
    ("T3.1", dict(n=2, p=2, pt=2, alpha=0)),
    ("T3.1", dict(n=3, p=1.5, pt=2.5, pt1=2, alpha=0.4)),
    ("T3.1", dict(n=2, m=2, p=2, pt=2, pt1=2, pt2=2)),
    ("T3.2", dict(n=2, m=1, p=2, pt=2, lam=-0.125)),
    ("T3.2", dict(n=2, m=2, p=2, pt=2, pt1=2, pt2=2, lam1=-0.1, lam2=-0.15)),
    ("T3.3", dict(n=3, lam=-0.25)),
    ("T4.1", dict(n=2, beta=0.5, p1=2)),
    ("T4.2", dict(n=2, p1=2, alpha1=1, beta=0.5, p2=2, alpha2=0)),
    ("T4.3", dict(n=2, beta=1)),
    ("T4.4", dict(n=2, alpha=0, beta=0.5, p1=2)),
    ("T4.5", dict(n=2, alpha=0, beta=0.5)),
    ("T5.2U", dict(n=2, p=2, q=2, alpha=0.5, sigma=1)),
    ("T5.2V", dict(n=2, p=2, q=2, alpha=0.5, sigma=1)),
    ("T5.3U", dict(n=2, p=2, q=2, alpha=0.5, lam=0.25, sigma=1)),
    ("T5.3V", dict(n=2, p=2, q=2, alpha=0.5, lam=0.25, sigma=1)),
]


def case(tid, **kw):
    return validate(TheoremCase(tid, kw))


# extrapolation ------------------------------------------------------------

def test_extrapolate_constant_sequence():
    assert extrapolate([0.1, 0.03, 0.01], [2.0, 2.0, 2.0]) == 2.0


def test_extrapolate_power_law_recovers_limit():
    eps = [0.1, 0.035, 0.0115]
    assert extrapolate(eps, [1.80, 1.93, 1.977]) >= 1.99
    exact = [3.0 - 0.7 * e**0.8 for e in eps]
    assert extrapolate(eps, exact) == pytest.approx(3.0, rel=1e-10)


def test_extrapolate_falls_back_to_last_point():
    assert extrapolate([0.1, 0.03, 0.01], [1.0, 1.5, 1.2]) == 1.2
    assert extrapolate([0.1, 0.03], [1.0, 1.5]) == 1.5
    with pytest.raises(VerifyError):
        extrapolate([], [])


# sweeps ---------------------------------------------------------------------

def test_eps_free_family_gives_one_value():
    ratios, lim = sweep_and_extrapolate(case("T4.2", n=2, p1=2, alpha1=1, beta=0.5, p2=2, alpha2=0))
    assert len(ratios) == 1 and ratios[0] == lim


def test_t31_sweep_increases_to_constant():
    c = case("T3.1", n=2, p=2, pt=2, alpha=0)
    ratios, lim = sweep_and_extrapolate(c)
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
    assert max(ratios) <= 2.0 and lim >= 1.96


def test_t32_eigen_exact():
    rep = verify_theorem(case("T3.2", n=2, m=1, p=2, pt=2, lam=-0.125), VerifyConfig(battery=0))
    assert rep.extrapolated_ratio == pytest.approx(8 / 7, rel=1e-8)
    assert rep.passed


@pytest.mark.parametrize("lam", [-0.4, -0.3, -0.2, -0.1])
def test_t33_ray_eigen(lam):
    rep = verify_theorem(case("T3.3", n=3, lam=lam), VerifyConfig(battery=0))
    assert rep.extrapolated_ratio == pytest.approx(1 / (1 + lam), rel=1e-6)


def test_t33_literal_flagged():
    rep = verify_theorem(case("T3.3", n=3, lam=-0.25), VerifyConfig(operator="literal", battery=2))
    assert rep.extrapolated_ratio == 0.0
    assert rep.details["literal_operator_max_abs"] <= 1e-14
    assert any("annihilates" in d for d in rep.discrepancies)
    assert not rep.passed


def test_zero_source_rejected():
    c = case("T3.1", n=2, p=2, pt=2, alpha=0)
    zero = MixedFunction(RadialProfile.from_segments([0, math.inf], [[]]), AngularPattern())
    with pytest.raises(ZeroSourceError):
        measure_ratio(c, zero)


def test_invalid_case_raises():
    with pytest.raises(ConstraintViolation):
        verify_theorem(TheoremCase("T3.3", {"n": 3, "lam": -2.0}))


def test_config_validation():
    with pytest.raises(VerifyError):
        VerifyConfig(operator="nope")
    with pytest.raises(VerifyError):
        VerifyConfig(battery=-1)
    with pytest.raises(VerifyError):
        VerifyConfig(tol_upper=0.0)


def test_t41_has_no_lower_bound():
    rep = verify_theorem(case("T4.1", n=2, beta=0.5, p1=2), VerifyConfig(battery=5))
    assert rep.lower_bound_ok is None
    assert rep.passed
    assert any("lower bound not applicable" in d for d in rep.discrepancies)


def test_m2_prefers_derived_constant():
    c = case("T3.1", n=2, m=2, p=2, pt=2, pt1=2, pt2=2)
    rep = verify_theorem(c, VerifyConfig(battery=2))
    assert rep.details["better_match"] == "derived"
    assert rep.constant == sharp_constant(c, "derived")


def test_deterministic_json():
    c = case("T3.1", n=3, p=1.5, pt=2.5, pt1=2, alpha=0.4)
    a = verify_theorem(c, VerifyConfig(seed=7, battery=6)).to_json()
    b = verify_theorem(c, VerifyConfig(seed=7, battery=6)).to_json()
    assert a == b
    assert "runtime_seconds" not in json.loads(a)


def test_random_admissible_reproducible():
    c = case("T2.1", m=2, n1=2, n2=3, p1=2, p2=3, pt1=2, pt2=2, q1=2, q2=2)
    f = random_admissible(c, np.random.default_rng(4))
    g = random_admissible(c, np.random.default_rng(4))
    assert isinstance(f, tuple) and len(f) == 2
    assert f[0].to_json() == g[0].to_json()


# soundness: no random input beats the constant -----------------------------

@pytest.mark.parametrize("tid,params", CASES, ids=[f"{t}-{i}" for i, (t, _) in enumerate(CASES)])
def test_battery_respects_constant(tid, params):
    c = case(tid, **params)
    m2 = params.get("m") == 2
    rep = verify_theorem(c, VerifyConfig(seed=1, battery=6 if m2 else 25))
    ratios = [s.ratio for s in rep.samples if s.label.startswith("random")]
    assert ratios
    C = rep.constant
    if tid.startswith("T5"):
        lo, hi = EQUIVALENCE_WINDOW
        assert all(C * lo <= r <= C * hi for r in ratios)
    else:
        assert max(ratios) <= C * (1 + 1e-3)
    assert rep.upper_bound_ok


def test_thin_shell_defeats_herz_lower_window():
    # compact thin shells push ||U f|| / ||f|| toward 0, which is why the T5
    # battery draws power-law profiles reaching both 0 and infinity
    c = case("T5.2U", n=2, p=2, q=2, alpha=0.5, sigma=1)
    C = sharp_constant(c)
    ratios = [
        measure_ratio(c, MixedFunction(RadialProfile.indicator(1.0, 1.0 + w), AngularPattern()))
        for w in (1e-1, 1e-3, 1e-6)
    ]
    assert ratios[0] > ratios[1] > ratios[2]
    assert ratios[-1] < C * EQUIVALENCE_WINDOW[0] / 100


# serialization --------------------------------------------------------------

def test_csv_and_json_shape():
    c = case("T3.1", n=2, p=2, pt=2, alpha=0)
    rep = verify_theorem(c, VerifyConfig(battery=3))
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + len(rep.samples)
    assert all(r[0] == "T3.1" and r[1] == param_hash(c) and r[-1] == "PASS" for r in rows[1:])
    d = json.loads(rep.to_json(timing=True))
    assert d["theorem"] == "T3.1" and d["passed"] is True
    assert d["constant"] == 2.0 and "runtime_seconds" in d
    assert len(d["samples"]) == len(rep.samples)


def test_param_hash_ignores_order_and_int_float():
    a = TheoremCase("T3.1", {"n": 2, "p": 2, "pt": 2, "alpha": 0})
    b = TheoremCase("T3.1", {"alpha": 0.0, "pt": 2.0, "p": 2.0, "n": 2})
    assert param_hash(a) == param_hash(b)
