"""Hardy-type operators acting on MixedFunctions.

Operators with a closed form return exact piecewise-power outputs; the
bilinear operator and tabulated weights are sampled on a log grid and
re-interpolated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .funcspace import AngularPattern, MixedFunction, RadialProfile
from .quadrature import (
    DEFAULT_GRID,
    DivergenceError,
    QuadGrid,
    antiderivative_profile,
    integrate_quarter_disk,
    integrate_radial,
    integrate_radial_numeric,
)
from .special import unit_ball_volume, unit_sphere_area

__all__ = [
    "OperatorError",
    "WeightFunction",
    "OperatorSpec",
    "apply_spherical_hardy",
    "apply_ray_average",
    "apply_fractional_hardy",
    "apply_conjugate_fractional_hardy",
    "apply_mlinear_hardy",
    "apply_product_hardy",
    "apply_weighted_average",
    "apply_operator",
    "fractional_hardy_numeric",
]

INF = math.inf
RADIAL = AngularPattern(1.0, 1.0)


class OperatorError(ValueError):
    """Invalid operator parameters."""


def _power(c, s):
    return RadialProfile.power(c, s)


@dataclass(frozen=True)
class WeightFunction:
    """psi on [0, 1]: either coeff * t**sigma or piecewise linear through samples."""

    coeff: float = 1.0
    sigma: float = 0.0
    t_samples: tuple | None = None
    values: tuple | None = None

    def __post_init__(self):
        if self.t_samples is None:
            if self.coeff < 0 or not self.sigma > -1:
                raise OperatorError("power weight needs coeff >= 0 and sigma > -1")
        else:
            t = np.asarray(self.t_samples, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if t.shape != v.shape or t.size < 2:
                raise OperatorError("tabulated weight needs matching samples")
            if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] > 1:
                raise OperatorError("weight samples must increase inside [0, 1]")
            if np.any(v < 0):
                raise OperatorError("weight must be nonnegative")

    @classmethod
    def power(cls, coeff=1.0, sigma=0.0):
        return cls(float(coeff), float(sigma))

    @classmethod
    def tabulated(cls, t, values):
        return cls(t_samples=tuple(float(x) for x in t), values=tuple(float(x) for x in values))

    @property
    def is_power(self) -> bool:
        return self.t_samples is None

    def profile(self) -> RadialProfile:
        """psi as a profile in t, zero for t >= 1."""
        if self.is_power:
            return RadialProfile.power(self.coeff, self.sigma, 0.0, 1.0)
        t = list(self.t_samples)
        v = list(self.values)
        breaks = [0.0]
        terms = []
        if t[0] > 0.0:
            # power extrapolation toward 0 through the first two samples
            if v[0] > 0 and v[1] > 0:
                s = math.log(v[1] / v[0]) / math.log(t[1] / t[0])
                if s <= -1:
                    s = 0.0
                terms.append([(v[0] / t[0] ** s, s, 0)])
            else:
                terms.append([(v[0], 0.0, 0)])
            breaks.append(t[0])
        for i in range(len(t) - 1):
            b = (v[i + 1] - v[i]) / (t[i + 1] - t[i])
            terms.append([(v[i] - b * t[i], 0.0, 0), (b, 1.0, 0)])
            breaks.append(t[i + 1])
        if t[-1] < 1.0:
            terms.append([(v[-1], 0.0, 0)])
            breaks.append(1.0)
        terms.append([])
        breaks.append(INF)
        return RadialProfile.from_segments(breaks, terms)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.is_power:
            return self.coeff * np.power(t, self.sigma)
        return self.profile()(t)

    def moment(self, a: float) -> float:
        """int_0^1 t^a psi(t) dt."""
        if self.is_power:
            if not (a + self.sigma > -1):
                raise DivergenceError(
                    f"moment integral int_0^1 t^{a:.6g} psi(t) dt diverges at t = 0", "0"
                )
            return self.coeff / (a + self.sigma + 1.0)
        try:
            return integrate_radial(self.profile(), a, (0.0, 1.0))
        except DivergenceError as exc:
            raise DivergenceError(f"moment integral int_0^1 t^{a:.6g} psi(t) dt diverges: {exc}", "0") from exc


def _check_dim(n):
    if int(n) != n or n < 1:
        raise OperatorError("dimension must be an integer >= 1")


def _zero_radial():
    return MixedFunction(RadialProfile.zero(), RADIAL)


def _hardy_profile(g: RadialProfile, n: int) -> RadialProfile:
    """n r^-n int_0^r g rho^{n-1}."""
    G = antiderivative_profile(g, n - 1)
    return G * _power(float(n), -float(n))


def apply_spherical_hardy(f: MixedFunction, n: int) -> MixedFunction:
    """Ball average over B(0, |x|); the output is radial."""
    _check_dim(n)
    mean = f.angular.mean
    if mean == 0.0 or f.radial.is_zero:
        return _zero_radial()
    return MixedFunction(_hardy_profile(f.radial, n) * mean, RADIAL)


def apply_ray_average(f: MixedFunction, n: int) -> MixedFunction:
    """n int_0^1 f(t x) t^{n-1} dt, which keeps the angular pattern."""
    _check_dim(n)
    if f.radial.is_zero:
        return MixedFunction(RadialProfile.zero(), f.angular)
    return MixedFunction(_hardy_profile(f.radial, n), f.angular)


def _check_beta(beta, n, allow_zero=False):
    ok = (0.0 <= beta < n) if allow_zero else (0.0 < beta < n)
    if not ok:
        raise OperatorError(f"beta must lie in {'[0' if allow_zero else '(0'}, n), got {beta}")


def apply_fractional_hardy(f: MixedFunction, n: int, beta: float) -> MixedFunction:
    """|B(0,|x|)|^{beta/n - 1} times the ball integral."""
    _check_dim(n)
    _check_beta(beta, n)
    mean = f.angular.mean
    if mean == 0.0 or f.radial.is_zero:
        return _zero_radial()
    factor = mean * unit_sphere_area(n) * unit_ball_volume(n) ** (beta / n - 1.0)
    G = antiderivative_profile(f.radial, n - 1)
    return MixedFunction(G * _power(factor, beta - n), RADIAL)


def fractional_hardy_numeric(f: MixedFunction, n: int, beta: float, r, grid: QuadGrid | None = None):
    """Pointwise values of the fractional Hardy operator by direct quadrature
    of the ball integral (no antiderivatives); a cross-check of the exact path."""
    _check_beta(beta, n)
    mean = f.angular.mean
    factor = mean * unit_sphere_area(n) * unit_ball_volume(n) ** (beta / n - 1.0)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    vals = [integrate_radial_numeric(f.radial, n - 1, (0.0, x), grid) for x in r]
    return factor * np.array(vals) * r ** (beta - n)


def apply_conjugate_fractional_hardy(f: MixedFunction, n: int, beta: float) -> MixedFunction:
    """Integral over |y| >= |x| of f(y) |B(0,|y|)|^{beta/n - 1}."""
    _check_dim(n)
    _check_beta(beta, n, allow_zero=True)
    mean = f.angular.mean
    if mean == 0.0 or f.radial.is_zero:
        return _zero_radial()
    factor = mean * unit_sphere_area(n) * unit_ball_volume(n) ** (beta / n - 1.0)
    G = antiderivative_profile(f.radial, beta - 1.0, direction="inf")
    return MixedFunction(G * factor, RADIAL)


def _end_exponent(g: RadialProfile, end: str):
    terms = g.end_terms(end)
    if not terms:
        return None
    if end == "head":
        return min(t[1] for t in terms)
    return max(t[1] for t in terms)


def apply_mlinear_hardy(fs: Sequence[MixedFunction], n: int, grid: QuadGrid | None = None) -> MixedFunction:
    """Joint ball average of f1(y1)...fm(ym) over |(y1,...,ym)| < |x|, m <= 2."""
    _check_dim(n)
    fs = list(fs)
    m = len(fs)
    if m == 1:
        return apply_spherical_hardy(fs[0], n)
    if m != 2:
        raise OperatorError(f"m-linear Hardy operator is implemented for m in {{1, 2}}, got {m}")
    grid = grid or DEFAULT_GRID
    mean = fs[0].angular.mean * fs[1].angular.mean
    g1, g2 = fs[0].radial, fs[1].radial
    if mean == 0.0 or g1.is_zero or g2.is_zero:
        return _zero_radial()
    factor = mean * unit_sphere_area(n) ** 2 / unit_ball_volume(2 * n)
    r = grid.nodes()
    vals = np.array([integrate_quarter_disk(g1, g2, x, n, (n - 1, n - 1), grid) for x in r]) * factor
    heads = [_end_exponent(g, "head") for g in (g1, g2)]
    head = sum(heads) if None not in heads else None
    tails = [_end_exponent(g, "tail") for g in (g1, g2)]
    tail = sum(-float(n) if s is None else max(s, -float(n)) for s in tails)
    h = RadialProfile.from_samples(r, vals, head_exponent=head, tail_exponent=tail)
    return MixedFunction(h, RADIAL)


def apply_product_hardy(fs: Sequence[RadialProfile], dims: Sequence[int]):
    """Factorwise ball averages of a separable input g1(|x1|) g2(|x2|)."""
    fs, dims = list(fs), list(dims)
    if len(fs) != len(dims) or not 1 <= len(fs) <= 2:
        raise OperatorError("product Hardy operator takes one or two factors with matching dims")
    out = []
    for g, d in zip(fs, dims):
        _check_dim(d)
        out.append(RadialProfile.zero() if g.is_zero else _hardy_profile(g, d))
    if any(h.is_zero for h in out):
        out = [RadialProfile.zero() for _ in out]
    return tuple(out)


def apply_weighted_average(f: MixedFunction, psi: WeightFunction, n: int, variant: str = "U", grid: QuadGrid | None = None) -> MixedFunction:
    """U: int_0^1 f(t x) psi(t) dt.  V: int_0^1 f(x / t) t^{-n} psi(t) dt."""
    _check_dim(n)
    if variant not in ("U", "V"):
        raise OperatorError("variant must be 'U' or 'V'")
    g = f.radial
    if g.is_zero:
        return MixedFunction(RadialProfile.zero(), f.angular)
    if psi.is_power:
        c, sig = psi.coeff, psi.sigma
        try:
            if variant == "U":
                G = antiderivative_profile(g, sig)
                h = G * _power(c, -sig - 1.0)
            else:
                G = antiderivative_profile(g, n - sig - 2.0, direction="inf")
                h = G * _power(c, sig - n + 1.0)
        except DivergenceError as exc:
            moment = "int_0^1 t^s psi(t) dt" if variant == "U" else "int_0^1 t^(-n-s) psi(t) dt"
            raise DivergenceError(f"moment integral {moment} diverges ({exc})", exc.endpoint) from exc
        return MixedFunction(h, f.angular)
    grid = grid or DEFAULT_GRID
    pp = psi.profile()
    r = grid.nodes()
    vals = []
    for x in r:
        if variant == "U":
            prod = g.scale_argument(x) * pp
        else:
            prod = g.invert_argument(x) * pp * _power(1.0, -float(n))
        vals.append(integrate_radial(prod, 0.0, (0.0, 1.0)))
    vals = np.array(vals)
    head = _end_exponent(g, "head")
    tail = _end_exponent(g, "tail")
    h = RadialProfile.from_samples(r, vals, head_exponent=head, tail_exponent=tail)
    return MixedFunction(h, f.angular)


@dataclass(frozen=True)
class OperatorSpec:
    """Operator selector: kind in {spherical, ray, fractional, conjugate,
    mlinear, product, U, V}."""

    kind: str
    n: int
    beta: float | None = None
    psi: WeightFunction | None = None
    dims: tuple | None = None

    _KINDS = ("spherical", "ray", "fractional", "conjugate", "mlinear", "product", "U", "V")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise OperatorError(f"unknown operator kind {self.kind!r}")
        _check_dim(self.n)
        if self.kind == "fractional":
            _check_beta(self.beta if self.beta is not None else -1.0, self.n)
        if self.kind == "conjugate":
            _check_beta(self.beta if self.beta is not None else -1.0, self.n, allow_zero=True)
        if self.kind in ("U", "V") and self.psi is None:
            raise OperatorError("weighted averages need a weight function")
        if self.kind == "product" and (not self.dims or any(d < 1 for d in self.dims)):
            raise OperatorError("product operator needs dims >= 1")


def apply_operator(spec: OperatorSpec, f, grid: QuadGrid | None = None):
    k = spec.kind
    if k == "spherical":
        return apply_spherical_hardy(f, spec.n)
    if k == "ray":
        return apply_ray_average(f, spec.n)
    if k == "fractional":
        return apply_fractional_hardy(f, spec.n, spec.beta)
    if k == "conjugate":
        return apply_conjugate_fractional_hardy(f, spec.n, spec.beta)
    if k == "mlinear":
        return apply_mlinear_hardy(f if isinstance(f, (list, tuple)) else [f], spec.n, grid)
    if k == "product":
        return apply_product_hardy(f, spec.dims)
    return apply_weighted_average(f, spec.psi, spec.n, k, grid)
