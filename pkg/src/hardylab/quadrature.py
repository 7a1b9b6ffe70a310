"""Radial integration engines.

Pure power pieces are integrated by antiderivative.  Integrals of |g|^p over
multi-term segments use Gauss-Legendre on logarithmic cells, split at sign
changes, with the ends at 0 and infinity replaced by closed-form tails of the
dominant term once the other terms are negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaincc

from .funcspace import RadialProfile, eval_terms, merge_terms
from ._kernels import abs_power_cells

__all__ = [
    "DivergenceError",
    "QuadGrid",
    "DEFAULT_GRID",
    "term_antiderivative",
    "integrate_radial",
    "cumulative_radial",
    "tail_radial",
    "antiderivative_profile",
    "integrate_abs_power",
    "integrate_abs_power_over",
    "integrate_quarter_disk",
    "integrate_radial_numeric",
]

INF = math.inf
_EPS = np.finfo(float).eps


class DivergenceError(ArithmeticError):
    """An integral diverges; ``endpoint`` names the offending end."""

    def __init__(self, message, endpoint=None):
        super().__init__(message)
        self.endpoint = endpoint


@dataclass(frozen=True)
class QuadGrid:
    r_min: float = 1e-6
    r_max: float = 1e6
    points_per_decade: int = 64
    order: int = 8

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max < INF):
            raise ValueError("need 0 < r_min < r_max < inf")
        if self.points_per_decade < 16:
            raise ValueError("points_per_decade must be >= 16")
        if self.order < 2:
            raise ValueError("quadrature order must be >= 2")

    def nodes(self) -> np.ndarray:
        """Log-spaced sample radii covering [r_min, r_max]."""
        d0, d1 = math.log10(self.r_min), math.log10(self.r_max)
        count = int(round((d1 - d0) * self.points_per_decade)) + 1
        return np.logspace(d0, d1, count)

    @property
    def cells_per_decade(self) -> int:
        return max(2, self.points_per_decade // self.order)

    def doubled(self) -> "QuadGrid":
        return QuadGrid(self.r_min, self.r_max, 2 * self.points_per_decade, self.order)


DEFAULT_GRID = QuadGrid()


@lru_cache(maxsize=None)
def _gauss(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


# exact antiderivatives ------------------------------------------------

def _F_terms(c, s, k, log_series=False):
    """Antiderivative of c r^s (ln r)^k as a list of terms.

    With ``log_series`` a pure power with |s + 1| <= 1e-6 gets the
    antiderivative (r^a - 1)/a = sum_j a^(j-1) ln^j r / j! instead of r^a/a,
    which cancels against any anchoring constant. Over the double range
    |a ln r| < 1e-3, so six terms are exact to rounding. It does not vanish
    at 0 or infinity, so callers anchor it at a finite point.
    """
    a = s + 1.0
    if a == 0.0:
        return [(c / (k + 1), 0.0, k + 1)]
    if log_series and k == 0 and abs(a) <= 1e-6:
        return [(c * a ** (j - 1) / math.factorial(j), 0.0, j) for j in range(1, 7)]
    out = []
    fact = 1.0
    for j in range(k + 1):
        if j:
            fact *= k - j + 1
        out.append((c * (-1) ** j * fact / a ** (j + 1), a, k - j))
    return out


def term_antiderivative(c, s, k, r):
    """Value at r of the antiderivative of c r^s (ln r)^k (vanishing constant)."""
    return eval_terms(_F_terms(c, s, k), r)


def _term_definite(c, s, k, lo, hi):
    """Exact int_lo^hi c r^s (ln r)^k dr with 0 <= lo < hi <= inf."""
    a = s + 1.0
    if lo == 0.0 and not (a > 0):
        raise DivergenceError(f"integrand ~ r^{s:.6g} not integrable at 0", "0")
    if hi == INF and not (a < 0):
        raise DivergenceError(f"integrand ~ r^{s:.6g} not integrable at infinity", "inf")
    if k == 0 and lo > 0 and hi < INF:
        # expm1 form avoids cancellation when a is near 0 or hi is near lo
        la, lb = math.log(lo), math.log(hi)
        if a == 0.0:
            return c * (lb - la)
        return c * math.exp(a * la) * math.expm1(a * (lb - la)) / a
    vhi = 0.0 if hi == INF else float(term_antiderivative(c, s, k, hi))
    vlo = 0.0 if lo == 0.0 else float(term_antiderivative(c, s, k, lo))
    return vhi - vlo


def _terms_definite(terms, w, lo, hi):
    return math.fsum(_term_definite(c, s + w, k, lo, hi) for c, s, k in terms)


def integrate_radial(g: RadialProfile, weight_exponent: float, interval=(0.0, INF), grid: QuadGrid | None = None) -> float:
    """int_a^b g(r) r^w dr, exact piece by piece."""
    a, b = float(interval[0]), float(interval[1])
    if not (0.0 <= a < b):
        raise ValueError("interval must satisfy 0 <= a < b")
    parts = []
    for lo, hi, terms in g.segments:
        lo2, hi2 = max(lo, a), min(hi, b)
        if lo2 >= hi2 or not terms:
            continue
        parts.append(_terms_definite(terms, weight_exponent, lo2, hi2))
    return math.fsum(parts)


def _cum_at_breaks(g: RadialProfile, w: float) -> np.ndarray:
    vals = [0.0]
    for lo, hi, terms in g.segments[:-1]:
        vals.append(vals[-1] + (_terms_definite(terms, w, lo, hi) if terms else 0.0))
    return np.array(vals)


def cumulative_radial(g: RadialProfile, weight_exponent: float, r):
    """int_0^r g(rho) rho^w drho for scalar or array r > 0."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("r must be positive")
    w = float(weight_exponent)
    head = g.segments[0][2]
    for c, s, k in head:
        if not (s + w > -1.0):
            raise DivergenceError(f"term r^{s:.6g} against r^{w:.6g} not integrable at 0", "0")
    base = _cum_at_breaks(g, w)
    idx = g.segment_index(r_arr)
    out = np.empty_like(r_arr)
    for i in np.unique(idx):
        lo, _, terms = g.segments[i]
        mask = idx == i
        rr = r_arr[mask]
        part = np.zeros_like(rr)
        for c, s, k in terms:
            if k == 0:
                a = s + w + 1.0
                if lo == 0.0:
                    part += c * rr**a / a
                else:
                    la = math.log(lo)
                    d = np.log(rr) - la
                    part += c * (d if a == 0.0 else math.exp(a * la) * np.expm1(a * d) / a)
            else:
                Fr = term_antiderivative(c, s + w, k, rr)
                Flo = 0.0 if lo == 0.0 else float(term_antiderivative(c, s + w, k, lo))
                part += Fr - Flo
        out[mask] = base[i] + part
    if np.ndim(r) == 0:
        return float(out[0])
    return out


def tail_radial(g: RadialProfile, weight_exponent: float, r):
    """int_r^inf g(rho) rho^w drho for scalar or array r > 0."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    w = float(weight_exponent)
    for c, s, k in g.segments[-1][2]:
        if not (s + w < -1.0):
            raise DivergenceError(f"term r^{s:.6g} against r^{w:.6g} not integrable at infinity", "inf")
    # tail sums from each break to infinity
    segs = g.segments
    after = np.zeros(len(segs) + 1)
    for i in range(len(segs) - 1, -1, -1):
        lo, hi, terms = segs[i]
        after[i] = after[i + 1] + (_terms_definite(terms, w, lo, hi) if terms else 0.0)
    idx = g.segment_index(r_arr)
    out = np.empty_like(r_arr)
    for i in np.unique(idx):
        _, hi, terms = segs[i]
        mask = idx == i
        vals = np.array([
            math.fsum(_term_definite(c, s + w, k, x, hi) for c, s, k in terms) for x in r_arr[mask]
        ]) if terms else np.zeros(mask.sum())
        out[mask] = after[i + 1] + vals
    if np.ndim(r) == 0:
        return float(out[0])
    return out


def antiderivative_profile(g: RadialProfile, weight_exponent: float, direction: str = "zero") -> RadialProfile:
    """Symbolic G(r) = int_0^r g rho^w (direction 'zero') or int_r^inf (direction 'inf')."""
    w = float(weight_exponent)
    segs = g.segments
    terms_out = []
    if direction == "zero":
        base = _cum_at_breaks(g, w)
        for i, (lo, hi, terms) in enumerate(segs):
            if i == 0:
                for c, s, k in terms:
                    if not (s + w > -1.0):
                        raise DivergenceError("antiderivative diverges at 0", "0")
            F = []
            for c, s, k in terms:
                F.extend(_F_terms(c, s + w, k, log_series=lo > 0.0))
            F = list(merge_terms(F))
            if lo > 0.0:
                flo = float(eval_terms(F, lo)) if F else 0.0
                const = base[i] - flo
                if abs(const) <= 64 * _EPS * (abs(base[i]) + abs(flo)):
                    const = 0.0
                F.append((const, 0.0, 0))
            terms_out.append(F)
    elif direction == "inf":
        for c, s, k in segs[-1][2]:
            if not (s + w < -1.0):
                raise DivergenceError("tail antiderivative diverges at infinity", "inf")
        after = np.zeros(len(segs) + 1)
        # after[0] is never used and may diverge at the origin
        for i in range(len(segs) - 1, 0, -1):
            lo, hi, terms = segs[i]
            after[i] = after[i + 1] + (_terms_definite(terms, w, lo, hi) if terms else 0.0)
        for i, (lo, hi, terms) in enumerate(segs):
            F = []
            for c, s, k in terms:
                F.extend((-cc, ss, kk) for cc, ss, kk in _F_terms(c, s + w, k, log_series=hi < INF))
            F = list(merge_terms(F))
            if hi < INF:
                # G(r) = after[i+1] + F_hi - F(r), with F(r) written as -F above
                fhi = -float(eval_terms(F, hi)) if F else 0.0
                const = after[i + 1] + fhi
                if abs(const) <= 64 * _EPS * (abs(after[i + 1]) + abs(fhi)):
                    const = 0.0
                F.append((const, 0.0, 0))
            terms_out.append(F)
    else:
        raise ValueError("direction must be 'zero' or 'inf'")
    return RadialProfile.from_segments(list(g.breaks), terms_out)


# |g|^p integrals --------------------------------------------------------

def _log_power_integral(A, m, x0):
    """int over t >= x0 > 0 of e^{-t} (t/|A|)^m dt / |A|, i.e. the closed form
    of int r^{A-1} |ln r|^m dr from 0 to R<1 (A>0) or R>1 to inf (A<0)."""
    a = abs(A)
    return math.gamma(m + 1.0) * float(gammaincc(m + 1.0, x0)) / a ** (m + 1.0)


def _power_integral_log(lc, A, lo, hi):
    """exp(lc) int_lo^hi r^(A-1) dr, with the scale kept in logs until the end."""
    if A == 0.0:
        return math.exp(lc) * (math.log(hi) - math.log(lo))
    if A > 0:
        frac = 1.0 if lo == 0.0 else -math.expm1(-A * (math.log(hi) - math.log(lo)))
        return math.exp(lc + A * math.log(hi)) * frac / A
    frac = 1.0 if hi == INF else -math.expm1(A * (math.log(hi) - math.log(lo)))
    return math.exp(lc + A * math.log(lo)) * frac / -A


def _single_term_abs_power(c, s, k, p, w, lo, hi, grid):
    """int_lo^hi |c r^s (ln r)^k|^p r^w dr."""
    A = p * s + w + 1.0
    m = p * k
    if lo == 0.0 and not (A > 0):
        raise DivergenceError(f"|g|^p r^w ~ r^{A - 1:.6g} not integrable at 0", "0")
    if hi == INF and not (A < 0):
        raise DivergenceError(f"|g|^p r^w ~ r^{A - 1:.6g} not integrable at infinity", "inf")
    if c == 0.0:
        return 0.0
    if k == 0:
        return _power_integral_log(p * math.log(abs(c)), A, lo, hi)
    ac = abs(c) ** p
    # split at 1 so that |ln r| keeps one sign on each part
    total = 0.0
    a, b = lo, hi
    if a < 1.0 < b:
        return _single_term_abs_power(c, s, k, p, w, a, 1.0, grid) + _single_term_abs_power(c, s, k, p, w, 1.0, b, grid)
    if a == 0.0:
        R = min(b, 0.5)
        total += ac * _log_power_integral(A, m, -A * math.log(R))
        a = R
    if b == INF:
        R = max(a, 2.0)
        total += ac * _log_power_integral(A, m, -A * math.log(R))
        b = R
    if a < b:
        total += _numeric_cells([(c, s, k)], p, w, a, b, grid)
    return total


def _numeric_cells(terms, p, w, a, b, grid, order=None):
    """Gauss-Legendre on log cells of [a, b] (0 < a < b < inf), split at sign changes."""
    order = order or grid.order
    x, wq = _gauss(order)
    decades = math.log10(b / a)
    ncell = max(1, int(math.ceil(decades * grid.cells_per_decade)))
    edges = np.geomspace(a, b, ncell + 1)
    # locate sign changes on a finer sample and split there
    if len(terms) > 1:
        fine = np.geomspace(a, b, 4 * ncell + 1)
        vals = eval_terms(terms, fine)
        roots = []
        for i in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
            roots.append(brentq(lambda r: float(eval_terms(terms, r)), fine[i], fine[i + 1], xtol=1e-15 * fine[i], rtol=4 * _EPS))
        if roots:
            edges = np.unique(np.concatenate([edges, roots]))
    c = np.array([[t[0] for t in terms]])
    e = np.array([[t[1] for t in terms]])
    k = np.array([[t[2] for t in terms]], dtype=np.int64)
    seg = np.zeros(edges.size - 1, dtype=np.int64)
    return float(abs_power_cells(edges[:-1], edges[1:], seg, x, wq, c, e, k, float(p), float(w)))


def _dominant(terms, end):
    """Index of the dominant term at 0 ('head') or infinity ('tail')."""
    if end == "head":
        key = lambda t: (t[1], -t[2])  # smallest exponent, then largest log power
    else:
        key = lambda t: (-t[1], -t[2])
    return min(range(len(terms)), key=lambda i: key(terms[i]))


def _rel_others(terms, d, r):
    cd, sd, kd = terms[d]
    lr = math.log(r)
    tot = 0.0
    for j, (c, s, k) in enumerate(terms):
        if j == d:
            continue
        tot += abs(c / cd) * r ** (s - sd) * abs(lr) ** (k - kd) if lr != 0 else INF
    return tot


def _tail_cut(terms, d, start, end, tol):
    """Radius beyond which the non-dominant terms are below tol relative."""
    r = start
    step = 2.0 if end == "tail" else 0.5
    for _ in range(4000):
        if r != 1.0 and _rel_others(terms, d, r) <= tol:
            return r
        r *= step
        if r == 0.0 or r == INF:
            break
    raise DivergenceError("could not separate the dominant term within double range", end)


def _end_contribution(terms, d, p, w, R, end):
    """Closed-form int of |g|^p r^w over (0, R] or [R, inf) with a first
    order correction for the non-dominant pure power terms."""
    cd, sd, kd = terms[d]
    A = p * sd + w + 1.0
    if end == "head" and not (A > 0):
        raise DivergenceError(f"|g|^p r^w ~ r^{A - 1:.6g} not integrable at 0", "0")
    if end == "tail" and not (A < 0):
        raise DivergenceError(f"|g|^p r^w ~ r^{A - 1:.6g} not integrable at infinity", "inf")
    ac = abs(cd) ** p
    if all(t[2] == 0 for t in terms):
        sgn = 1.0 if end == "head" else -1.0
        main = sgn * R**A / A
        corr = 0.0
        for j, (c, s, k) in enumerate(terms):
            if j == d:
                continue
            B = A + p * (s - sd)
            corr += sgn * p * (c / cd) * R**B / B
        return ac * (main + corr)
    return ac * _log_power_integral(A, p * kd, -A * math.log(R))


def _log_domain_end(terms, d, p, w, R, end):
    """int of |g|^p r^w over [R, inf) or (0, R] evaluated in u = ln r with
    the dominant power factored out, for terms too close to separate."""
    cd, sd, kd = terms[d]
    A = p * sd + w + 1.0
    if end == "head" and not (A > 0):
        raise DivergenceError(f"|g|^p r^w ~ r^{A - 1:.6g} not integrable at 0", "0")
    if end == "tail" and not (A < 0):
        raise DivergenceError(f"|g|^p r^w ~ r^{A - 1:.6g} not integrable at infinity", "inf")
    u0 = math.log(R)
    kmax = max(t[2] for t in terms)
    span = (46.0 + 4.0 * p * kmax * math.log1p(abs(u0) + 46.0 / abs(A))) / abs(A)
    widths = [0.25]
    while sum(widths) < span:
        widths.append(widths[-1] * 1.05)
    edges = np.concatenate([[0.0], np.cumsum(widths)])
    sgn = 1.0 if end == "tail" else -1.0
    x, wq = _gauss(16)
    a, b = edges[:-1], edges[1:]
    t = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * x[None, :]
    u = u0 + sgn * t
    S = np.zeros_like(u)
    for c, s_, k in terms:
        S += (c / cd) * np.exp((s_ - sd) * u) * (u**k if k else 1.0)
    # the dominant factor is taken relative to u0 to keep exponentials bounded
    vals = np.exp(A * (u - u0)) * np.abs(S) ** p
    integral = float(np.sum(0.5 * (b - a) * (vals @ wq)))
    return abs(cd) ** p * math.exp(A * u0) * integral


def _abs_power_segment(terms, lo, hi, p, w, grid):
    if not terms:
        return 0.0
    if len(terms) == 1:
        c, s, k = terms[0]
        return _single_term_abs_power(c, s, k, p, w, lo, hi, grid)
    tol = 1e-7 if all(t[2] == 0 for t in terms) else 1e-12
    total = 0.0
    a, b = lo, hi
    if a == 0.0:
        d = _dominant(terms, "head")
        start = min(b, 1.0) if b < INF else 1.0
        try:
            R = _tail_cut(terms, d, start * (0.5 if start == 1.0 else 1.0), "head", tol)
            R = min(R, b)
            total += _end_contribution(terms, d, p, w, R, "head")
        except DivergenceError as exc:
            if exc.endpoint != "head":
                raise
            R = start * (0.5 if start == 1.0 else 1.0)
            total += _log_domain_end(terms, d, p, w, R, "head")
        a = R
    if b == INF:
        d = _dominant(terms, "tail")
        start = max(a, 1.0)
        try:
            R = _tail_cut(terms, d, start * (2.0 if start == 1.0 else 1.0), "tail", tol)
            R = max(R, a)
            total += _end_contribution(terms, d, p, w, R, "tail")
        except DivergenceError as exc:
            if exc.endpoint != "tail":
                raise
            R = start * (2.0 if start == 1.0 else 1.0)
            total += _log_domain_end(terms, d, p, w, R, "tail")
        b = R
    if a < b:
        total += _numeric_cells(list(terms), p, w, a, b, grid)
    return total


def integrate_abs_power_over(g: RadialProfile, p: float, weight_exponent: float, interval=(0.0, INF), grid: QuadGrid | None = None) -> float:
    """int_a^b |g(r)|^p r^w dr."""
    grid = grid or DEFAULT_GRID
    a, b = float(interval[0]), float(interval[1])
    parts = []
    for lo, hi, terms in g.segments:
        lo2, hi2 = max(lo, a), min(hi, b)
        if lo2 >= hi2 or not terms:
            continue
        parts.append(_abs_power_segment(terms, lo2, hi2, float(p), float(weight_exponent), grid))
    return math.fsum(parts)


def integrate_abs_power(g: RadialProfile, p: float, weight_exponent: float, grid: QuadGrid | None = None) -> float:
    return integrate_abs_power_over(g, p, weight_exponent, (0.0, INF), grid)


def integrate_radial_numeric(g: RadialProfile, weight_exponent: float, interval, grid: QuadGrid | None = None, floor: float = 1e-16) -> float:
    """Signed int_a^b g r^w by Gauss-Legendre on log cells only.

    An independent cross-check of the exact path; a lower limit of 0 is
    replaced by floor * b.
    """
    grid = grid or DEFAULT_GRID
    a, b = float(interval[0]), float(interval[1])
    if b == INF:
        raise ValueError("numeric path needs a finite upper limit")
    a = max(a, floor * b)
    x, wq = _gauss(grid.order)
    edges = [a] + [t for t in g.finite_breaks() if a < t < b] + [b]
    total = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        ncell = max(1, int(math.ceil(math.log10(hi / lo) * grid.cells_per_decade)))
        ce = np.geomspace(lo, hi, ncell + 1)
        la, lb = np.log(ce[:-1]), np.log(ce[1:])
        u = 0.5 * (la + lb)[:, None] + 0.5 * (lb - la)[:, None] * x[None, :]
        rr = np.exp(u)
        mid = np.sqrt(lo * hi)
        terms = g.segments[int(g.segment_index(mid))][2]
        vals = eval_terms(terms, rr) * rr ** (weight_exponent + 1.0)
        total.append(float(np.sum(0.5 * (lb - la) * (vals @ wq))))
    return math.fsum(total)


# quarter disk -----------------------------------------------------------

def _graded(a, b, toward, ncell, ratio=0.5):
    """Cell edges on [a, b] refined geometrically toward one end."""
    L = b - a
    if toward == "lo":
        d = L * ratio ** np.arange(ncell, -1, -1)
        return np.concatenate([[a], a + d])
    d = L * ratio ** np.arange(ncell, -1, -1)
    return np.concatenate([b - d[::-1], [b]])


def integrate_quarter_disk(g1: RadialProfile, g2: RadialProfile, r: float, n: int, exponent_pair=None, grid: QuadGrid | None = None) -> float:
    """int over rho1, rho2 > 0, rho1^2 + rho2^2 < 1 of
    g1(r rho1) g2(r rho2) rho1^e1 rho2^e2.

    With rho1 = sin(theta) the inner rho2 integral is an exact cumulative
    integral of g2, leaving a one-dimensional integral in theta.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    e1, e2 = exponent_pair if exponent_pair is not None else (n - 1, n - 1)
    if g1.is_zero or g2.is_zero:
        return 0.0
    for g, e, axis in ((g1, e1, "rho1"), (g2, e2, "rho2")):
        for c, s, k in g.segments[0][2]:
            if not (s + e > -1.0):
                raise DivergenceError(f"integrand not integrable near the {axis} = 0 axis", axis)
    x, wq = _gauss(16)
    half_pi = 0.5 * math.pi
    pts = {0.0, half_pi}
    for b in g1.finite_breaks():
        if b < r:
            pts.add(math.asin(b / r))
    for b in g2.finite_breaks():
        if b < r:
            pts.add(math.acos(b / r))
    pts = sorted(pts)
    b1 = g1.finite_breaks()
    first1 = b1[0] if b1.size else INF
    head_terms = g1.segments[0][2]
    has_head_logs = any(k for _, _, k in head_terms)
    theta_min = 1e-40 if has_head_logs else 1e-7
    if first1 < INF:
        theta_min = min(theta_min, 0.5 * math.asin(min(1.0, first1 / r)))

    def I2(t):
        return r ** (-e2 - 1.0) * cumulative_radial(g2, e2, r * t)

    nodes, weights = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 0:
            continue
        if a == 0.0 and b == half_pi:
            segs = [(theta_min, 0.25 * math.pi, "lo"), (0.25 * math.pi, half_pi, "hi")]
        elif a == 0.0:
            segs = [(theta_min, b, "lo")]
        elif b == half_pi:
            segs = [(a, b, "hi")]
        else:
            segs = [(a, b, None)]
        for lo, hi, toward in segs:
            if toward is None:
                edges = np.linspace(lo, hi, 9)
            elif toward == "lo":
                edges = np.geomspace(lo, hi, max(8, int(math.ceil(4 * math.log10(hi / lo)))) + 1)
            else:
                edges = half_pi - np.geomspace(half_pi - lo, 1e-15, 60)
                edges = np.concatenate([edges, [half_pi]])
            for ca, cb in zip(edges[:-1], edges[1:]):
                hw = 0.5 * (cb - ca)
                nodes.append(0.5 * (ca + cb) + hw * x)
                weights.append(hw * wq)
    th = np.concatenate(nodes)
    wt = np.concatenate(weights)
    s, c = np.sin(th), np.cos(th)
    vals = g1(r * s) * s**e1 * I2(c) * c
    total = float(np.dot(vals, wt))
    # analytic head on (0, theta_min): sin ~ theta and cos ~ 1
    if not has_head_logs:
        i2_1 = float(I2(1.0))
        for cc, ss, _ in head_terms:
            a_exp = ss + e1 + 1.0
            total += cc * r**ss * i2_1 * theta_min**a_exp / a_exp
    return total
