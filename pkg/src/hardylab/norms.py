"""Norm functionals on MixedFunctions.

All norms factor into an angular part, computed from the two hemisphere
values, and a radial integral of the profile.  Suprema (weak level, Morrey
radius, Morrey-Herz truncation) are found by a log-grid scan followed by a
bounded Brent refinement around the best point.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .funcspace import MixedFunction, RadialProfile, angular_lp_norm, eval_terms
from .quadrature import (
    DEFAULT_GRID,
    DivergenceError,
    QuadGrid,
    _abs_power_segment,
    _power_integral_log,
    _dominant,
    _tail_cut,
    cumulative_radial,
    integrate_abs_power_over,
)
from .special import unit_ball_volume, unit_sphere_area

__all__ = [
    "NormError",
    "SpaceError",
    "UnboundedNormError",
    "DivergentTailError",
    "NonPowerTailError",
    "SpaceSpec",
    "mixed_lebesgue_norm",
    "weak_mixed_norm",
    "central_morrey_norm",
    "cmo_norm",
    "herz_norm",
    "morrey_herz_norm",
    "norm",
    "norm_record",
    "superlevel_intervals",
]

INF = math.inf
KINDS = ("lebesgue", "weak", "morrey", "cmo", "lambda_cmo", "herz", "morrey_herz")


class NormError(ArithmeticError):
    pass


class SpaceError(ValueError):
    """Invalid space parameters."""


class UnboundedNormError(NormError):
    pass


class DivergentTailError(NormError, DivergenceError):
    def __init__(self, message, tail=None):
        DivergenceError.__init__(self, message, tail)
        self.tail = tail


class NonPowerTailError(NormError):
    pass


@dataclass(frozen=True)
class SpaceSpec:
    """Parameters of one norm functional.

    ``p`` is the radial exponent and ``pt`` the angular one.  ``alpha`` is the
    power weight (Lebesgue, weak) or the Herz exponent; ``lam`` is the Morrey
    growth index; ``q`` the Herz sequence exponent.
    """

    kind: str
    n: int
    p: float
    pt: float
    alpha: float = 0.0
    lam: float = 0.0
    q: float | None = None

    def __post_init__(self):
        errs = []
        if self.kind not in KINDS:
            raise SpaceError(f"unknown space kind {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            errs.append("n must be an integer >= 1")
        if self.kind in ("weak", "lebesgue"):
            if not (1.0 <= self.p < INF):
                errs.append("1 <= p < inf required")
        elif not (1.0 < self.p < INF):
            errs.append("1 < p < inf required")
        if not (1.0 < self.pt < INF):
            errs.append("1 < pt < inf required")
        if self.kind in ("lebesgue", "weak") and not (self.n + self.alpha > 0):
            errs.append("n + alpha > 0 required")
        if self.kind == "lambda_cmo" and not (-1.0 / self.p < self.lam < 1.0 / self.n):
            errs.append("-1/p < lambda < 1/n required")
        if self.kind == "morrey" and not (self.lam > -1.0 / self.p):
            errs.append("lambda > -1/p required")
        if self.kind in ("herz", "morrey_herz"):
            if self.q is None or not (0.0 < self.q < INF):
                errs.append("0 < q < inf required")
        if self.kind == "morrey_herz" and not (self.lam >= 0.0):
            errs.append("lambda >= 0 required")
        if errs:
            raise SpaceError("; ".join(errs))

    @classmethod
    def lebesgue(cls, n, p, pt, alpha=0.0):
        return cls("lebesgue", n, p, pt, alpha=alpha)

    @classmethod
    def weak(cls, n, p, pt, alpha=0.0):
        return cls("weak", n, p, pt, alpha=alpha)

    @classmethod
    def morrey(cls, n, p, pt, lam):
        return cls("morrey", n, p, pt, lam=lam)

    @classmethod
    def cmo(cls, n, p, pt):
        return cls("cmo", n, p, pt)

    @classmethod
    def lambda_cmo(cls, n, p, pt, lam):
        return cls("lambda_cmo", n, p, pt, lam=lam)

    @classmethod
    def herz(cls, n, alpha, q, p, pt):
        return cls("herz", n, p, pt, alpha=alpha, q=q)

    @classmethod
    def morrey_herz(cls, n, alpha, q, lam, p, pt):
        return cls("morrey_herz", n, p, pt, alpha=alpha, lam=lam, q=q)


def _angular(f: MixedFunction, spec: SpaceSpec) -> float:
    return angular_lp_norm(f.angular, 0.0, spec.pt, spec.n)


def _zero(f: MixedFunction) -> bool:
    return f.radial.is_zero or (f.angular.value_pos == 0.0 and f.angular.value_neg == 0.0)


def _sup_log(fun, lo, hi, extra=(), npts=256, widen=True, what="supremum", x_min=1e-200, x_max=1e200):
    """Supremum of fun over x in (0, inf), scanning [lo, hi] on a log grid."""
    xs = np.unique(np.concatenate([np.geomspace(lo, hi, npts), [x for x in extra if lo <= x <= hi]]))
    vals = np.array([fun(x) for x in xs])
    if np.any(np.isinf(vals)):
        raise UnboundedNormError(f"{what} is infinite")
    for _ in range(40 if widen else 0):
        i = int(np.argmax(vals))
        best = vals[i]
        if 0 < i < xs.size - 1:
            break
        if (i == 0 and xs[0] * 1e-4 < x_min) or (i > 0 and xs[-1] * 1e4 > x_max):
            break
        if i == 0:
            nx = np.geomspace(xs[0] * 1e-4, xs[0], 17)[:-1]
            xs = np.concatenate([nx, xs])
            vals = np.concatenate([[fun(x) for x in nx], vals])
        else:
            nx = np.geomspace(xs[-1], xs[-1] * 1e4, 17)[1:]
            xs = np.concatenate([xs, nx])
            vals = np.concatenate([vals, [fun(x) for x in nx]])
        if np.any(np.isinf(vals)):
            raise UnboundedNormError(f"{what} is infinite")
        if not np.max(vals) > best * (1.0 + 1e-10):
            # converged toward a limit at the boundary
            return float(np.max(vals))
    i = int(np.argmax(vals))
    if widen and (i == 0 or i == xs.size - 1):
        raise UnboundedNormError(f"{what} grows without bound")
    best = float(vals[i])
    if 0 < i < xs.size - 1:
        a, b = math.log(xs[i - 1]), math.log(xs[i + 1])
        res = minimize_scalar(
            lambda u: -fun(math.exp(u)), bounds=(a, b), method="bounded", options={"xatol": 1e-12}
        )
        best = max(best, -float(res.fun))
    return best


# Lebesgue ---------------------------------------------------------------

def mixed_lebesgue_norm(f: MixedFunction, spec: SpaceSpec, grid: QuadGrid | None = None) -> float:
    if spec.kind not in ("lebesgue",):
        raise SpaceError("mixed_lebesgue_norm needs a lebesgue space")
    if _zero(f):
        return 0.0
    w = spec.n - 1.0 + spec.alpha
    integral = integrate_abs_power_over(f.radial, spec.p, w, (0.0, INF), grid)
    return _angular(f, spec) * integral ** (1.0 / spec.p)


# weak -------------------------------------------------------------------

def _end_window(terms, end, L, lo, hi):
    """A radius beyond which |sum of terms| - L keeps one sign."""
    d = _dominant(terms, end)
    c, s, k = terms[d]
    bound = 1e-300 if end == "head" else 1e300
    try:
        start = (min(hi, 1.0) * 0.5) if end == "head" else (max(lo, 1.0) * 2.0)
        cut = _tail_cut(terms, d, start, end, 1e-3) if len(terms) > 1 else start
    except DivergenceError:
        return bound
    grow = (s < 0) if end == "head" else (s > 0)
    target = L * (1e3 if grow else 1e-3)
    if s != 0.0:
        t = math.log(target / abs(c)) / s
        rdom = 0.0 if t < -700.0 else (INF if t > 700.0 else math.exp(t))
    elif k > 0:
        x = min((target / abs(c)) ** (1.0 / k), 700.0)
        rdom = math.exp(-x) if end == "head" else math.exp(x)
    else:
        rdom = cut
    if end == "head":
        return max(bound, min(cut, rdom, hi) * 0.5)
    return min(bound, max(cut, rdom, lo) * 2.0)


def _segment_superlevel(terms, lo, hi, L):
    if not terms:
        return []
    if len(terms) == 1 and terms[0][2] == 0:
        c, s, _ = terms[0]
        ac = abs(c)
        if s == 0.0:
            return [(lo, hi)] if ac > L else []
        t = math.log(L / ac) / s
        x = 0.0 if t < -700.0 else (INF if t > 700.0 else math.exp(t))
        if s > 0:
            a, b = max(lo, x), hi
        else:
            a, b = lo, min(hi, x)
        return [(a, b)] if a < b else []
    left = lo if lo > 0.0 else _end_window(terms, "head", L, lo, hi)
    right = hi if hi < INF else _end_window(terms, "tail", L, lo, hi)
    if not left < right:
        left, right = min(left, right), max(left, right) * (1 + 1e-12)
    npts = max(33, int(32 * math.log10(right / left)) + 2)
    xs = np.geomspace(left, right, npts)
    fv = np.abs(eval_terms(terms, xs)) - L
    pos = fv > 0

    def func(r):
        return abs(float(eval_terms(terms, r))) - L

    crossings = []
    for i in np.nonzero(pos[:-1] != pos[1:])[0]:
        crossings.append(brentq(func, xs[i], xs[i + 1], xtol=1e-15 * xs[i], rtol=1e-15))
    bounds = [lo if lo == 0.0 or lo == left else left] + crossings + [hi if hi == INF or hi == right else right]
    bounds[0] = lo
    bounds[-1] = hi
    out = []
    state = bool(pos[0])
    for a, b in zip(bounds[:-1], bounds[1:]):
        if state and a < b:
            out.append((a, b))
        state = not state
    return out


def superlevel_intervals(g: RadialProfile, L: float):
    """Intervals of {r > 0 : |g(r)| > L}, merged."""
    out = []
    for lo, hi, terms in g.segments:
        for a, b in _segment_superlevel(terms, lo, hi, L):
            if out and out[-1][1] >= a:
                out[-1] = (out[-1][0], max(out[-1][1], b))
            else:
                out.append((a, b))
    return out


def _measure(intervals, w):
    a1 = w + 1.0
    tot = 0.0
    for a, b in intervals:
        if b == INF:
            return INF
        tot += (b**a1 - a**a1) / a1
    return tot


def _weak_objective_factory(f: MixedFunction, spec: SpaceSpec):
    w = spec.n - 1.0 + spec.alpha
    om = unit_sphere_area(spec.n)
    va, vb = sorted((abs(f.angular.value_pos), abs(f.angular.value_neg)), reverse=True)
    ratio = spec.p / spec.pt
    half = (0.5 * om) ** ratio
    g = f.radial

    def W(lam):
        ea = _measure(superlevel_intervals(g, lam / va), w) if va > 0 else 0.0
        eb = _measure(superlevel_intervals(g, lam / vb), w) if vb > 0 else 0.0
        if ea == INF or eb == INF:
            return INF
        return half * ((ea - eb) + 2.0**ratio * eb)

    def phi(lam):
        m = W(lam)
        return INF if m == INF else lam * m ** (1.0 / spec.p)

    return phi, W, va, vb


def _critical_levels(f: MixedFunction, va, vb):
    """|f| values at breakpoints (both sides) and on constant segments."""
    g = f.radial
    vals = []
    for lo, hi, terms in g.segments:
        if not terms:
            continue
        for x in (lo, hi):
            if 0.0 < x < INF:
                vals.append(abs(float(eval_terms(terms, x))))
        if all(t[1] == 0.0 and t[2] == 0 for t in terms):
            vals.append(abs(sum(t[0] for t in terms)))
    out = []
    for v in vals:
        for x in (va, vb):
            if x > 0 and v > 0:
                out.append(v * x)
    return out


def weak_mixed_norm(f: MixedFunction, spec: SpaceSpec, grid: QuadGrid | None = None) -> float:
    """sup over lam > 0 of lam times the mixed norm of the superlevel indicator."""
    if spec.kind != "weak":
        raise SpaceError("weak_mixed_norm needs a weak space")
    if _zero(f):
        return 0.0
    phi, W, va, vb = _weak_objective_factory(f, spec)
    crit = _critical_levels(f, va, vb)
    grid = grid or DEFAULT_GRID
    r = np.geomspace(grid.r_min, grid.r_max, 241)
    absf = np.abs(f.radial(r)) * va
    absf = absf[absf > 0]
    pool = list(absf) + crit
    if not pool:
        return 0.0
    lo, hi = min(pool), max(pool)
    if lo == hi:
        lo, hi = lo * 1e-3, hi * 1e3
    # just below each critical level the superlevel set is largest
    extra = []
    for c in crit:
        extra.extend([c * (1 - 1e-12), c * (1 - 1e-9)])
    try:
        best = _sup_log(phi, lo, hi, extra=extra, what="weak norm")
    except UnboundedNormError:
        raise
    for c in extra:
        best = max(best, phi(c))
    return best


# Morrey / CMO -------------------------------------------------------------

def _cum_abs_power(g: RadialProfile, p, w, r, grid):
    """int_0^r |g|^p rho^w for each r in the array."""
    r = np.asarray(r, dtype=float)
    segs = g.segments
    base = [0.0]
    for lo, hi, terms in segs[:-1]:
        base.append(base[-1] + _abs_power_segment(terms, lo, hi, p, w, grid))
    idx = g.segment_index(r)
    out = np.empty_like(r)
    for i in np.unique(idx):
        lo, _, terms = segs[i]
        mask = idx == i
        rr = r[mask]
        if not terms:
            part = np.zeros_like(rr)
        elif len(terms) == 1 and terms[0][2] == 0:
            c, s, _ = terms[0]
            A = p * s + w + 1.0
            if lo == 0.0 and not A > 0:
                raise DivergenceError("|g|^p not locally integrable at 0", "0")
            part = np.array([_power_integral_log(p * math.log(abs(c)), A, lo, x) if c else 0.0 for x in rr])
        else:
            part = np.array([_abs_power_segment(terms, lo, x, p, w, grid) for x in rr])
        out[mask] = base[i] + part
    return out


def _scan_range(g: RadialProfile, pad=8.0):
    b = g.finite_breaks()
    if b.size:
        return float(b.min()) * 10**-pad, float(b.max()) * 10**pad
    return 10**-pad, 10**pad


def _end_data(g, end):
    terms = g.end_terms(end)
    if not terms:
        return None
    d = _dominant(terms, end)
    return terms[d]


def central_morrey_norm(f: MixedFunction, spec: SpaceSpec, grid: QuadGrid | None = None) -> float:
    """sup_r (1/(nu r^{n + n lam p}) int_{B(0,r)} ...)^{1/p}."""
    if spec.kind not in ("morrey",):
        raise SpaceError("central_morrey_norm needs a morrey space")
    if _zero(f):
        return 0.0
    return _morrey_core(f.radial, _angular(f, spec), spec.n, spec.p, spec.lam, grid)


def _morrey_core(g, ang, n, p, lam, grid):
    grid = grid or DEFAULT_GRID
    nu = unit_ball_volume(n)
    expo = n * (1.0 + lam * p)
    w = n - 1.0
    target = n * lam
    limits = []
    # exponents produced by operators carry rounding; compare with slack
    slack = 1e-12 * max(1.0, abs(target))
    head = _end_data(g, "head")
    if head is not None:
        c, s, k = head
        same = abs(s - target) <= slack
        if (s < target and not same) or (same and k > 0):
            raise UnboundedNormError("Morrey quotient blows up as r -> 0")
        if same and len(g.end_terms("head")) == 1:
            limits.append(abs(c) ** p / ((p * s + n) * nu))
    tail = _end_data(g, "tail")
    if tail is not None:
        c, s, k = tail
        same = abs(s - target) <= slack
        if p * s + n > 0 and ((s > target and not same) or (same and k > 0)):
            raise UnboundedNormError("Morrey quotient blows up as r -> inf")
        if same and p * s + n > 0:
            limits.append(abs(c) ** p / ((p * s + n) * nu))

    def quotient(r):
        return float(_cum_abs_power(g, p, w, np.array([r]), grid)[0]) / (nu * r**expo)

    lo, hi = _scan_range(g)
    xs = np.geomspace(lo, hi, 257)
    ext = np.unique(np.concatenate([xs, g.finite_breaks()]))
    vals = _cum_abs_power(g, p, w, ext, grid) / (nu * ext**expo)
    i = int(np.argmax(vals))
    best = float(vals[i])
    if 0 < i < ext.size - 1:
        a, b = math.log(ext[i - 1]), math.log(ext[i + 1])
        res = minimize_scalar(lambda u: -quotient(math.exp(u)), bounds=(a, b), method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    best = max([best] + limits)
    return ang * best ** (1.0 / p)


def _cmo_inner(f: MixedFunction, spec: SpaceSpec, r: float, shift: float, grid):
    """int_0^r ||f(rho .) - shift||_{L^pt}^p rho^{n-1} drho."""
    n, p, pt = spec.n, spec.p, spec.pt
    g = f.radial
    if f.angular.is_constant:
        v = f.angular.value_pos
        prof = g * v - shift
        return unit_sphere_area(n) ** (p / pt) * integrate_abs_power_over(prof, p, n - 1.0, (0.0, r), grid)
    if shift == 0.0:
        return _angular(f, spec) ** p * integrate_abs_power_over(g, p, n - 1.0, (0.0, r), grid)
    # general pattern with a nonzero shift: Gauss-Legendre on log cells
    grid = grid or DEFAULT_GRID
    x, wq = np.polynomial.legendre.leggauss(grid.order)
    a = r * 1e-14
    edges = [a] + [b for b in g.finite_breaks() if a < b < r] + [r]
    tot = 0.0
    pat = f.angular
    for lo, hi in zip(edges[:-1], edges[1:]):
        ncell = max(1, int(math.ceil(math.log10(hi / lo) * grid.cells_per_decade)))
        ce = np.geomspace(lo, hi, ncell + 1)
        la, lb = np.log(ce[:-1]), np.log(ce[1:])
        u = 0.5 * (la + lb)[:, None] + 0.5 * (lb - la)[:, None] * x[None, :]
        rr = np.exp(u)
        gv = g(rr)
        ang = angular_lp_norm_vec(pat.value_pos * gv - shift, pat.value_neg * gv - shift, pt, n)
        tot += float(np.sum(0.5 * (lb - la) * ((ang**p * rr**n) @ wq)))
    return tot


def angular_lp_norm_vec(a, b, pt, n):
    half = 0.5 * unit_sphere_area(n)
    return (half * (np.abs(a) ** pt + np.abs(b) ** pt)) ** (1.0 / pt)


def cmo_norm(f: MixedFunction, spec: SpaceSpec, grid: QuadGrid | None = None, infimum: bool = False) -> float:
    """Central (lambda-)CMO norm with the ball average f_B as the shift.

    With ``infimum=True`` the shift is instead chosen to minimize each
    ball's oscillation.
    """
    if spec.kind not in ("cmo", "lambda_cmo"):
        raise SpaceError("cmo_norm needs a cmo or lambda_cmo space")
    if _zero(f):
        return 0.0
    lam = spec.lam if spec.kind == "lambda_cmo" else 0.0
    mean = f.angular.mean
    n, p = spec.n, spec.p
    if mean == 0.0 and not infimum:
        return _morrey_core(f.radial, _angular(f, spec), n, p, lam, grid)
    nu = unit_ball_volume(n)
    expo = n * (1.0 + lam * p)
    g = f.radial

    def ball_mean(r):
        return mean * n * cumulative_radial(g, n - 1.0, r) / r**n

    def quotient(r):
        if infimum:
            c0 = ball_mean(r)
            span = max(abs(c0), float(np.max(np.abs(g(np.geomspace(r * 1e-6, r, 64))))) * max(abs(f.angular.value_pos), abs(f.angular.value_neg)))
            res = minimize_scalar(lambda c: _cmo_inner(f, spec, r, c, grid), bounds=(c0 - span, c0 + span), method="bounded", options={"xatol": 1e-12 * (span + 1e-300)})
            val = min(float(res.fun), _cmo_inner(f, spec, r, c0, grid))
        else:
            val = _cmo_inner(f, spec, r, ball_mean(r), grid)
        return val / (nu * r**expo)

    lo, hi = _scan_range(g, pad=6.0)
    span = 10.0 ** (250.0 / (expo + n))
    best = _sup_log(quotient, lo, hi, extra=list(g.finite_breaks()), npts=129, what="CMO quotient", x_min=1 / span, x_max=span)
    return best ** (1.0 / p)


# Herz -----------------------------------------------------------------------

def _shell_log2(g, spec, k, grid, ang):
    """log2 of 2^{k alpha q} ||f chi_k||^q."""
    val = integrate_abs_power_over(g, spec.p, spec.n - 1.0, (2.0 ** (k - 1), 2.0**k), grid)
    if val <= 0.0:
        return -INF
    return spec.q * (k * spec.alpha + math.log2(ang) + math.log2(val) / spec.p)


def _tail_model(g, spec, end, ang):
    """(log2 K^q, log2 ratio, first power-law k) for the geometric shell tail."""
    terms = g.end_terms(end)
    if not terms:
        return None
    d = _dominant(terms, end)
    c, s, k = terms[d]
    if k != 0:
        raise NonPowerTailError(f"{end} of the profile carries a logarithmic factor")
    lo, hi, _ = g.segments[0] if end == "head" else g.segments[-1]
    if len(terms) > 1:
        start = (min(hi, 1.0) * 0.5) if end == "head" else (max(lo, 1.0) * 2.0)
        try:
            R = _tail_cut(terms, d, start, end, 1e-12)
        except DivergenceError:
            # exponents too close to separate: the shells get summed explicitly
            return ("explicit", terms, d, hi if end == "head" else lo)
    else:
        # a single segment over (0, inf) is pure everywhere; any finite cap works
        R = min(hi, 2.0**1000) if end == "head" else max(lo, 1e-300)
    p, q, n, a = spec.p, spec.q, spec.n, spec.alpha
    e = p * s + n
    shell = math.log(2.0) if e == 0.0 else (1.0 - 2.0**-e) / e
    log2K = q * (math.log2(ang) + math.log2(abs(c)) + math.log2(shell) / p)
    log2rho = q * (a + e / p)
    if end == "head":
        kb = math.floor(math.log2(R))  # shells with 2^k <= R are pure
    else:
        kb = math.ceil(math.log2(R)) + 1  # shells with 2^{k-1} >= R
    return log2K, log2rho, kb


def _logsumexp2(x):
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return -INF
    m = np.max(x)
    if m == -INF:
        return -INF
    return float(m + np.log2(np.sum(np.exp2(x - m))))


_GL16 = np.polynomial.legendre.leggauss(16)


def _shells_explicit(terms, d, spec, ks, ang):
    """log2 of 2^{k alpha q} ||f chi_k||^q for shells inside one segment,
    vectorized over k; r = 2^k t with t in [1/2, 1]."""
    x, w = _GL16
    t = 0.75 + 0.25 * x
    cd, sd, _ = terms[d]
    ks = np.asarray(ks, dtype=float)[:, None]
    S = np.zeros((ks.shape[0], t.size))
    for c, s_, _k in terms:
        S += (c / cd) * np.exp2(ks * (s_ - sd)) * t**s_
    vals = np.abs(S) ** spec.p * t ** (spec.n - 1.0)
    integ = 0.25 * (vals @ w)
    with np.errstate(divide="ignore"):
        lg = np.log2(integ)
    ks = ks[:, 0]
    p, q = spec.p, spec.q
    return q * (ks * spec.alpha + math.log2(ang) + (math.log2(abs(cd)) * p + ks * (p * sd + spec.n) + lg) / p)


def _explicit_end(model, spec, ang, k_edge, end, chunk=2048, max_shells=1 << 20):
    """Shell indices and log2 values beyond k_edge until they are negligible."""
    _, terms, d, _ = model
    cd, sd, _ = terms[d]
    rate = spec.q * (spec.alpha + (spec.p * sd + spec.n) / spec.p)
    if end == "head" and not rate > 0:
        raise DivergentTailError("Herz sum diverges as k -> -inf (head tail)", "head")
    if end == "tail" and not rate < 0:
        raise DivergentTailError("Herz sum diverges as k -> +inf (tail)", "tail")
    out_k, out_v = [], []
    top = -INF
    k = k_edge
    while len(out_k) * chunk < max_shells:
        ks = np.arange(k - chunk, k)[::-1] if end == "head" else np.arange(k + 1, k + 1 + chunk)
        vals = _shells_explicit(terms, d, spec, ks, ang)
        out_k.append(ks)
        out_v.append(vals)
        top = max(top, float(np.max(vals)))
        if float(np.max(vals[-chunk // 8:])) < top - 80.0:
            ks_all, v_all = np.concatenate(out_k), np.concatenate(out_v)
            order = np.argsort(ks_all)
            return ks_all[order], v_all[order], rate
        k = int(ks[-1])
    raise NonPowerTailError(f"{end} shells decay too slowly to sum explicitly")


def _herz_parts(f, spec, k_range, grid, tails):
    g = f.radial
    ang = _angular(f, spec)
    kmin, kmax = k_range
    head = tail = None
    if tails:
        head = _tail_model(g, spec, "head", ang)
        tail = _tail_model(g, spec, "tail", ang)
        ex_head = ex_tail = None
        if head is not None and head[0] == "explicit":
            ex_head, head = head, None
            kmin = min(kmin, math.floor(math.log2(ex_head[3])))
        if tail is not None and tail[0] == "explicit":
            ex_tail, tail = tail, None
            kmax = max(kmax, math.ceil(math.log2(ex_tail[3])) + 1)
        if head is not None:
            kmin = min(kmin, head[2])
        if tail is not None:
            kmax = max(kmax, tail[2])
        b = g.finite_breaks()
        if b.size:
            kmin = min(kmin, math.floor(math.log2(b.min())) - 1)
            kmax = max(kmax, math.ceil(math.log2(b.max())) + 1)
        if kmax - kmin > 4000:
            raise NonPowerTailError("shell range needed to reach the power-law tails is too large")
    ks = np.arange(kmin, kmax + 1)
    logs = np.array([_shell_log2(g, spec, int(k), grid, ang) for k in ks])
    if tails:
        rates = {}
        if ex_head is not None:
            hk, hv, rates["head"] = _explicit_end(ex_head, spec, ang, int(ks[0]), "head")
            ks, logs = np.concatenate([hk, ks]), np.concatenate([hv, logs])
        if ex_tail is not None:
            tk, tv, rates["tail"] = _explicit_end(ex_tail, spec, ang, int(ks[-1]), "tail")
            ks, logs = np.concatenate([ks, tk]), np.concatenate([logs, tv])
        if rates:
            head = head if head is not None else (("rate", rates["head"]) if "head" in rates else None)
            tail = tail if tail is not None else (("rate", rates["tail"]) if "tail" in rates else None)
    return ks, logs, head, tail


def _head_sum_log2(head, kmin):
    """log2 of the sum over k < kmin of the head model."""
    if head is None or head[0] == "rate":
        return -INF
    log2K, log2rho, _ = head
    if not log2rho > 0:
        raise DivergentTailError("Herz sum diverges as k -> -inf (head tail)", "head")
    # sum_{k <= kmin-1} rho^k = rho^{kmin-1} / (1 - 1/rho)
    return log2K + (kmin - 1) * log2rho - math.log2(-math.expm1(-log2rho * math.log(2.0)))


def _tail_sum_log2(tail, kmax):
    if tail is None or tail[0] == "rate":
        return -INF
    log2K, log2rho, _ = tail
    if not log2rho < 0:
        raise DivergentTailError("Herz sum diverges as k -> +inf (tail)", "tail")
    return log2K + (kmax + 1) * log2rho - math.log2(-math.expm1(log2rho * math.log(2.0)))


def herz_norm(f: MixedFunction, spec: SpaceSpec, k_range=(-60, 60), grid: QuadGrid | None = None, tails: bool = True) -> float:
    """Dyadic shell sum; geometric tails beyond ``k_range`` are summed in
    closed form unless ``tails`` is False (plain truncated sum)."""
    if spec.kind != "herz":
        raise SpaceError("herz_norm needs a herz space")
    if _zero(f):
        return 0.0
    ks, logs, head, tail = _herz_parts(f, spec, k_range, grid, tails)
    parts = list(logs)
    if tails:
        parts.append(_head_sum_log2(head, int(ks[0])))
        parts.append(_tail_sum_log2(tail, int(ks[-1])))
    return 2.0 ** (_logsumexp2(parts) / spec.q)


def morrey_herz_norm(f: MixedFunction, spec: SpaceSpec, k_range=(-60, 60), grid: QuadGrid | None = None, tails: bool = True) -> float:
    """sup over k0 of 2^{-k0 lam} (sum_{k <= k0} 2^{k alpha q} ||f chi_k||^q)^{1/q}."""
    if spec.kind != "morrey_herz":
        raise SpaceError("morrey_herz_norm needs a morrey_herz space")
    if _zero(f):
        return 0.0
    q, lam = spec.q, spec.lam
    if lam == 0.0:
        hz = SpaceSpec.herz(spec.n, spec.alpha, q, spec.p, spec.pt)
        return herz_norm(f, hz, k_range, grid, tails)
    ks, logs, head, tail = _herz_parts(f, spec, k_range, grid, tails)
    start = _head_sum_log2(head, int(ks[0])) if tails else -INF
    run = np.empty(ks.size)
    acc = start
    for i, lv in enumerate(logs):
        if lv > -INF:
            acc = float(np.logaddexp2(acc, lv))
        run[i] = acc
    cand = list(-ks * lam + run / q)
    # a flat quotient (slope 0) is the eigenfunction case; allow rounding
    slack = 1e-12 * max(1.0, abs(lam))
    # ends that were summed shell by shell only need the growth check
    if tails and head is not None and head[0] == "rate":
        if head[1] / q - lam < -slack:
            raise UnboundedNormError("Morrey-Herz quotient grows as k0 -> -inf")
        head = None
    if tails and tail is not None and tail[0] == "rate":
        if tail[1] / q - lam > slack:
            raise UnboundedNormError("Morrey-Herz quotient grows as k0 -> +inf")
        tail = None
    if tails and head is not None:
        log2K, log2rho, _ = head
        slope = log2rho / q - lam
        # for k0 < kmin the value is K (1-1/rho)^{-1/q} 2^{k0 slope}
        base = (log2K - math.log2(-math.expm1(-log2rho * math.log(2.0)))) / q
        if slope < -slack:
            raise UnboundedNormError("Morrey-Herz quotient grows as k0 -> -inf")
        kk = np.arange(int(ks[0]) - 200, int(ks[0]))
        cand.extend(base + kk * slope)
    if tails and tail is not None:
        log2K, log2rho, _ = tail
        slope = log2rho / q - lam
        if slope > slack:
            raise UnboundedNormError("Morrey-Herz quotient grows as k0 -> +inf")
        if log2rho == 0.0 and lam == 0.0:
            raise UnboundedNormError("Morrey-Herz quotient grows as k0 -> +inf")
        kk = np.arange(1, 4001)
        k0 = ks[-1] + kk
        # running sum beyond kmax: S + K^q sum_{j=kmax+1}^{k0} rho^j
        if log2rho == 0.0:
            extra = log2K + np.log2(kk.astype(float))
        else:
            # log2 of |2^{kk log2rho} - 1| / |2^{log2rho} - 1| without overflow
            x = kk * log2rho
            big = np.maximum(x, 0.0)
            num = big + np.log2(np.abs(np.exp2(x - big) - np.exp2(-big)))
            den = max(log2rho, 0.0) + math.log2(abs(2.0 ** (log2rho - max(log2rho, 0.0)) - 2.0 ** (-max(log2rho, 0.0))))
            extra = log2K + (ks[-1] + 1) * log2rho + num - den
        tot = np.logaddexp2(run[-1], extra) if run[-1] > -INF else extra
        cand.extend(-k0 * lam + tot / q)
        if abs(slope) <= slack and log2rho > 0:
            cand.append((log2K - math.log2(-math.expm1(-log2rho * math.log(2.0)))) / q)
    return 2.0 ** max(cand)


# dispatch ---------------------------------------------------------------

def norm(f: MixedFunction, spec: SpaceSpec, grid: QuadGrid | None = None, **kw) -> float:
    k = spec.kind
    if k == "lebesgue":
        return mixed_lebesgue_norm(f, spec, grid)
    if k == "weak":
        return weak_mixed_norm(f, spec, grid)
    if k == "morrey":
        return central_morrey_norm(f, spec, grid)
    if k in ("cmo", "lambda_cmo"):
        return cmo_norm(f, spec, grid, **kw)
    if k == "herz":
        return herz_norm(f, spec, grid=grid, **kw)
    return morrey_herz_norm(f, spec, grid=grid, **kw)


def norm_record(f: MixedFunction, spec: SpaceSpec, grid: QuadGrid | None = None) -> dict:
    """{space, params, value, error_estimate}; the error estimate is the
    change under node doubling."""
    grid = grid or DEFAULT_GRID
    v = norm(f, spec, grid)
    v2 = norm(f, spec, grid.doubled())
    params = {k: v_ for k, v_ in asdict(spec).items() if k != "kind" and v_ is not None}
    return {"space": spec.kind, "params": params, "value": v, "error_estimate": abs(v2 - v)}
