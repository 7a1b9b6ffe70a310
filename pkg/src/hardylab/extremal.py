"""Extremal and near-extremal function families for each theorem."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .funcspace import INF, AngularPattern, MixedFunction, RadialProfile
from .sharpconst import TheoremCase, validate

__all__ = [
    "ExtremalError",
    "EpsilonRangeError",
    "FamilyUnavailableError",
    "ExtremalFamily",
    "DEFAULT_EPSILONS",
    "extremal_family",
    "make_extremal",
    "default_epsilons",
]

DEFAULT_EPSILONS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)

RADIAL = AngularPattern(1.0, 1.0)


class ExtremalError(ValueError):
    pass


class EpsilonRangeError(ExtremalError):
    pass


class FamilyUnavailableError(ExtremalError):
    pass


@dataclass(frozen=True)
class ExtremalFamily:
    """``builder`` maps epsilon to a MixedFunction (or a tuple for product
    and bilinear cases).  ``epsilon_max`` is None for epsilon-free families."""

    theorem_id: str
    builder: Callable
    epsilon_max: float | None
    notes: str = ""
    degenerate: bool = False

    @property
    def indexed(self) -> bool:
        return self.epsilon_max is not None

    def __call__(self, epsilon=None):
        if self.epsilon_max is None:
            if epsilon is not None:
                raise EpsilonRangeError(f"{self.theorem_id} family takes no epsilon")
            return self.builder(None)
        if epsilon is None:
            raise EpsilonRangeError(f"{self.theorem_id} family needs epsilon in (0, {self.epsilon_max:g})")
        if not 0.0 < epsilon < self.epsilon_max:
            raise EpsilonRangeError(f"epsilon must lie in (0, {self.epsilon_max:g}), got {epsilon}")
        return self.builder(float(epsilon))


def _pw(s, lo=0.0, hi=INF, pattern=RADIAL):
    return MixedFunction(RadialProfile.power(1.0, s, lo, hi), pattern)


def _t21(P):
    m = P["m"]
    caps = [1.0]
    for i in range(1, m + 1):
        n, p, a = P[f"n{i}"], P[f"p{i}"], P[f"alpha{i}"]
        caps.append(n * (1.0 - 1.0 / p) - a / p)

    def build(eps):
        out = []
        for i in range(1, m + 1):
            n, p, a = P[f"n{i}"], P[f"p{i}"], P[f"alpha{i}"]
            out.append(_pw(-(n + a) / p - eps, 1.0))
        return tuple(out)

    return ExtremalFamily("T2.1", build, min(caps), "factorwise r^(-(n_i+alpha_i)/p_i - eps) on r > 1")


def _t31(P):
    n, m, p, a = P["n"], P["m"], P["p"], P["alpha"]
    if m == 1:
        cap = min(1.0, n * (1.0 - 1.0 / p) - a / p)
        return ExtremalFamily(
            "T3.1", lambda e: _pw(-(n + a) / p - e, 1.0), cap, "r^(-(n+alpha)/p - eps) on r > 1"
        )
    if m != 2:
        raise FamilyUnavailableError("T3.1 extremal families are built for m <= 2")
    p1, p2 = P["p1"], P["p2"]
    w1, w2 = P["alpha1"] * p1 / p, P["alpha2"] * p2 / p
    h = math.sqrt(0.5)
    # local integrability of each factor against rho^{n-1}
    cap = min(1.0, (n - (n + w1) / p1) * p1 / p2, n - (n + w2) / p2)

    def build(eps):
        return (
            _pw(-(n + w1) / p1 - p2 * eps / p1, h),
            _pw(-(n + w2) / p2 - eps, h),
        )

    return ExtremalFamily("T3.1", build, cap, "pair of powers cut at |y_i| > sqrt(2)/2")


def _t32(P):
    n, m = P["n"], P["m"]
    lams = [P[f"lam{i}"] for i in range(1, m + 1)] if m <= 2 else None
    if lams is None:
        raise FamilyUnavailableError("T3.2 extremal families are built for m <= 2")
    for i, li in enumerate(lams, 1):
        if li <= -1.0 / P[f"p{i}"]:
            raise FamilyUnavailableError(
                f"lambda{i} = -1/p{i}: r^(n lambda) has infinite norm; the space is L^p there"
            )
    fs = tuple(_pw(n * li) for li in lams)
    return ExtremalFamily("T3.2", lambda e: fs[0] if m == 1 else fs, None, "eigenfunction r^(n lambda)")


def _t33(P):
    n, lam = P["n"], P["lam"]
    sign = -1.0 if n % 2 else 1.0
    f = _pw(n * lam, pattern=AngularPattern(1.0, sign))
    note = "r^(n lambda) with hemispherical sign (1, (-1)^n)"
    return ExtremalFamily("T3.3", lambda e: f, None, note, degenerate=(n % 2 == 0))


def _t42(P):
    f = _pw(-P["alpha1"] / (P["p1"] - 1.0), 0.0, 1.0)
    return ExtremalFamily("T4.2", lambda e: f, None, "r^(-alpha1/(p1-1)) on r < 1")


def _t43(P):
    f = MixedFunction(RadialProfile.indicator(0.0, 1.0), RADIAL)
    return ExtremalFamily("T4.3", lambda e: f, None, "indicator of the unit ball")


def _t44(P):
    n, b, a, p1 = P["n"], P["beta"], P["alpha"], P["p1"]
    f = _pw((b - n - a) / (p1 - 1.0), 1.0)
    return ExtremalFamily("T4.4", lambda e: f, None, "r^((beta-n-alpha)/(p1-1)) on r > 1")


def _t45(P):
    n, b, a = P["n"], P["beta"], P["alpha"]
    return ExtremalFamily(
        "T4.5", lambda e: _pw(-(b + n + a) / e, 1.0), 1.0, "r^(-(beta+n+alpha)/eps) on r > 1"
    )


def _t5(tid):
    def make(P):
        s = -P["alpha"] - P["n"] / P["p"] + P.get("lam", 0.0)
        f = _pw(s)
        return ExtremalFamily(tid, lambda e: f, None, "power eigenfunction r^(-alpha-n/p+lambda)")

    return make


def _t41(P):
    raise FamilyUnavailableError("T4.1 has no explicit extremal family; only upper bounds are checked")


_BUILDERS = {
    "T2.1": _t21,
    "T3.1": _t31,
    "T3.2": _t32,
    "T3.3": _t33,
    "T4.1": _t41,
    "T4.2": _t42,
    "T4.3": _t43,
    "T4.4": _t44,
    "T4.5": _t45,
    "T5.2U": _t5("T5.2U"),
    "T5.2V": _t5("T5.2V"),
    "T5.3U": _t5("T5.3U"),
    "T5.3V": _t5("T5.3V"),
}


def extremal_family(case: TheoremCase) -> ExtremalFamily:
    if not case.side_conditions_checked:
        case = validate(case)
    return _BUILDERS[case.theorem_id](case.params)


def make_extremal(case: TheoremCase, epsilon: float | None = None):
    """The extremal function of ``case`` at ``epsilon`` (None for
    epsilon-free families)."""
    return extremal_family(case)(epsilon)


def default_epsilons(family: ExtremalFamily, epsilons=DEFAULT_EPSILONS) -> list:
    if not family.indexed:
        return []
    return [e for e in epsilons if 0.0 < e < family.epsilon_max]
