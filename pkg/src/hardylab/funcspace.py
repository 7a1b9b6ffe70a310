"""Function model: piecewise power-law radial profiles times two-value
hemispherical angular patterns.

A radial profile is stored as a list of pieces ``c * r**s * (ln r)**k`` on
half-open intervals ``[r_lo, r_hi)``.  Pieces sharing the same interval are
summed, so an interval (a *segment*) may carry several terms.  Segments must
tile ``(0, inf)`` without gaps.  Operator outputs such as
``A r**-n + B r**s`` fit this model exactly; ``k > 0`` only shows up at the
logarithmic boundary cases of the antiderivative.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .special import unit_sphere_area

__all__ = [
    "ProfileError",
    "PowerPiece",
    "RadialProfile",
    "AngularPattern",
    "MixedFunction",
    "evaluate",
    "angular_lp_norm",
    "scale_argument",
    "merge_terms",
    "eval_terms",
]

INF = math.inf


class ProfileError(ValueError):
    """Malformed profile or invalid evaluation request."""


def merge_terms(terms: Iterable[tuple]) -> tuple:
    """Combine terms with equal (exponent, log power) and drop zero coefficients."""
    acc: dict = {}
    for c, s, k in terms:
        key = (float(s), int(k))
        acc[key] = acc.get(key, 0.0) + float(c)
    out = [(c, s, k) for (s, k), c in acc.items() if c != 0.0]
    out.sort(key=lambda t: (t[1], t[2]))
    return tuple(out)


def eval_terms(terms: Sequence[tuple], r):
    """Evaluate sum c r^s (ln r)^k at r (scalar or array, r > 0)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    if not terms:
        return out
    lr = np.log(r)
    for c, s, k in terms:
        val = c * np.power(r, s)
        if k:
            val = val * lr**k
        out = out + val
    return out


@dataclass(frozen=True)
class PowerPiece:
    """c * r**s * (ln r)**k on [r_lo, r_hi)."""

    r_lo: float
    r_hi: float
    coeff: float
    exponent: float
    log_power: int = 0

    def __post_init__(self):
        if not (self.r_lo >= 0.0) or not (self.r_lo < self.r_hi):
            raise ProfileError(f"bad piece interval [{self.r_lo}, {self.r_hi})")
        if math.isinf(self.r_lo):
            raise ProfileError("piece cannot start at infinity")
        if not (math.isfinite(self.coeff) and math.isfinite(self.exponent)):
            raise ProfileError("piece coefficient and exponent must be finite")
        if int(self.log_power) != self.log_power or self.log_power < 0:
            raise ProfileError("log power must be a non-negative integer")


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Radial function g on (0, inf) given by contiguous power-law pieces."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(sorted(self.pieces, key=lambda p: (p.r_lo, p.r_hi)))
        if not pieces:
            raise ProfileError("profile needs at least one piece")
        object.__setattr__(self, "pieces", pieces)
        segs = []
        for pc in pieces:
            if segs and segs[-1][0] == pc.r_lo and segs[-1][1] == pc.r_hi:
                segs[-1][2].append((pc.coeff, pc.exponent, pc.log_power))
            else:
                segs.append([pc.r_lo, pc.r_hi, [(pc.coeff, pc.exponent, pc.log_power)]])
        if segs[0][0] != 0.0:
            raise ProfileError("pieces must start at r = 0")
        if segs[-1][1] != INF:
            raise ProfileError("pieces must extend to infinity")
        for a, b in zip(segs[:-1], segs[1:]):
            if a[1] != b[0]:
                raise ProfileError(f"pieces leave a gap or overlap at {a[1]} / {b[0]}")
        object.__setattr__(
            self, "_segments", tuple((lo, hi, merge_terms(t)) for lo, hi, t in segs)
        )

    # construction -----------------------------------------------------
    @classmethod
    def from_segments(cls, breaks: Sequence[float], terms: Sequence[Sequence[tuple]]):
        """Build from breakpoints ``0 = b0 < b1 < ... < inf`` and per-segment terms."""
        if len(breaks) != len(terms) + 1:
            raise ProfileError("need one term list per segment")
        pieces = []
        for i, tl in enumerate(terms):
            lo, hi = float(breaks[i]), float(breaks[i + 1])
            tl = merge_terms(tl)
            if not tl:
                pieces.append(PowerPiece(lo, hi, 0.0, 0.0))
            for c, s, k in tl:
                pieces.append(PowerPiece(lo, hi, c, s, k))
        return cls(tuple(pieces))

    @classmethod
    def power(cls, coeff=1.0, exponent=0.0, lo=0.0, hi=INF):
        """coeff * r**exponent on [lo, hi), zero elsewhere."""
        breaks = [0.0]
        terms = []
        if lo > 0.0:
            breaks.append(lo)
            terms.append([])
        breaks.append(hi)
        terms.append([(coeff, exponent, 0)])
        if hi < INF:
            breaks.append(INF)
            terms.append([])
        return cls.from_segments(breaks, terms)

    @classmethod
    def constant(cls, c=1.0):
        return cls.power(c, 0.0)

    @classmethod
    def zero(cls):
        return cls((PowerPiece(0.0, INF, 0.0, 0.0),))

    @classmethod
    def indicator(cls, lo=0.0, hi=INF):
        return cls.power(1.0, 0.0, lo, hi)

    @classmethod
    def from_samples(cls, r, values, head_exponent=None, tail_exponent=None):
        """Interpolating profile through samples (r_i, v_i).

        Between nodes of equal sign the interpolant is the power law through
        both samples; otherwise it is linear in r.  Beyond the first and last
        nodes a power law is extended, using the given exponent hints or the
        local log-log slope of the end cells.
        """
        r = np.asarray(r, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.size < 2 or r.shape != v.shape:
            raise ProfileError("need at least two samples")
        if np.any(np.diff(r) <= 0) or r[0] <= 0:
            raise ProfileError("sample radii must be positive and increasing")
        breaks = [0.0] + list(r) + [INF]
        terms = [None] * (r.size + 1)
        for i in range(r.size - 1):
            terms[i + 1] = _interp_cell(r[i], r[i + 1], v[i], v[i + 1])
        terms[0] = _end_power(r[0], v[0], r[1], v[1], head_exponent)
        terms[-1] = _end_power(r[-1], v[-1], r[-2], v[-2], tail_exponent)
        return cls.from_segments(breaks, terms)

    # basic access -----------------------------------------------------
    @property
    def segments(self) -> tuple:
        """Tuple of (lo, hi, terms) with merged terms."""
        return self._segments

    @cached_property
    def breaks(self) -> np.ndarray:
        return np.array([s[0] for s in self._segments] + [INF])

    @cached_property
    def table(self):
        """Padded term arrays (coeff, exponent, log_power), shape (segments, K)."""
        kmax = max(1, max(len(s[2]) for s in self._segments))
        S = len(self._segments)
        c = np.zeros((S, kmax))
        e = np.zeros((S, kmax))
        lp = np.zeros((S, kmax), dtype=np.int64)
        for i, (_, _, terms) in enumerate(self._segments):
            for j, (cc, ss, kk) in enumerate(terms):
                c[i, j], e[i, j], lp[i, j] = cc, ss, kk
        return c, e, lp

    @cached_property
    def has_logs(self) -> bool:
        return any(k for _, _, t in self._segments for _, _, k in t)

    @property
    def is_zero(self) -> bool:
        return all(not t for _, _, t in self._segments)

    def finite_breaks(self) -> np.ndarray:
        return self.breaks[1:-1]

    def segment_index(self, r):
        return np.searchsorted(self.breaks, r, side="right") - 1

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ProfileError("profiles are evaluated at r > 0 only")
        from ._kernels import eval_piecewise

        c, e, lp = self.table
        flat = np.ascontiguousarray(r.ravel())
        out = eval_piecewise(flat, self.breaks, c, e, lp)
        if r.ndim == 0:
            return float(out[0])
        return out.reshape(r.shape)

    def end_terms(self, end: str) -> tuple:
        """Terms of the first ('head') or last ('tail') segment."""
        return self._segments[0][2] if end == "head" else self._segments[-1][2]

    # algebra ----------------------------------------------------------
    def _map_terms(self, fn):
        return RadialProfile.from_segments(
            list(self.breaks), [fn(lo, hi, t) for lo, hi, t in self._segments]
        )

    def __mul__(self, other):
        if isinstance(other, RadialProfile):
            return _combine(self, other, _mul_terms)
        a = float(other)
        return self._map_terms(lambda lo, hi, t: [(a * c, s, k) for c, s, k in t])

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __add__(self, other):
        if not isinstance(other, RadialProfile):
            other = RadialProfile.constant(float(other))
        return _combine(self, other, lambda a, b: list(a) + list(b))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, RadialProfile):
            other = RadialProfile.constant(float(other))
        return self + (-other)

    def refine(self, points: Iterable[float]):
        """Same function with extra breakpoints inserted."""
        pts = sorted({float(x) for x in points if 0.0 < x < INF} | set(self.breaks[1:-1]))
        breaks = [0.0] + pts + [INF]
        mids = [_mid(breaks[i], breaks[i + 1]) for i in range(len(breaks) - 1)]
        idx = self.segment_index(np.array(mids))
        return RadialProfile.from_segments(breaks, [self._segments[i][2] for i in idx])

    def restrict(self, lo=0.0, hi=INF):
        """Multiply by the indicator of [lo, hi)."""
        ref = self.refine([lo, hi])
        return ref._map_terms(lambda a, b, t: t if (a >= lo and b <= hi) else [])

    def scale_argument(self, t: float):
        """Profile of r -> g(t r)."""
        t = float(t)
        if not t > 0:
            raise ProfileError("scale must be positive")
        lt = math.log(t)
        breaks = [b / t for b in self.breaks]
        terms = []
        for _, _, tl in self._segments:
            out = []
            for c, s, k in tl:
                base = c * t**s
                for j in range(k + 1):
                    out.append((base * math.comb(k, j) * lt ** (k - j), s, j))
            terms.append(out)
        return RadialProfile.from_segments(breaks, terms)

    def invert_argument(self, t: float):
        """Profile of r -> g(t / r)."""
        t = float(t)
        if not t > 0:
            raise ProfileError("scale must be positive")
        lt = math.log(t)
        segs = self._segments[::-1]
        breaks = [0.0] + [t / lo if lo > 0 else INF for lo, _, _ in segs]
        terms = []
        for _, _, tl in segs:
            out = []
            for c, s, k in tl:
                base = c * t**s
                # (ln t - ln r)^k expanded in powers of ln r
                for j in range(k + 1):
                    out.append((base * math.comb(k, j) * lt ** (k - j) * (-1) ** j, -s, j))
            terms.append(out)
        return RadialProfile.from_segments(breaks, terms)

    # serialization ----------------------------------------------------
    def to_list(self) -> list:
        out = []
        for pc in self.pieces:
            d = {
                "lo": pc.r_lo,
                "hi": "inf" if pc.r_hi == INF else pc.r_hi,
                "coeff": pc.coeff,
                "exp": pc.exponent,
            }
            if pc.log_power:
                d["log"] = pc.log_power
            out.append(d)
        return out

    @classmethod
    def from_list(cls, items: Sequence[dict]):
        pieces = []
        for d in items:
            hi = d["hi"]
            hi = INF if (isinstance(hi, str) and hi.lower() in ("inf", "infinity")) else float(hi)
            pieces.append(
                PowerPiece(float(d["lo"]), hi, float(d["coeff"]), float(d["exp"]), int(d.get("log", 0)))
            )
        return cls(tuple(pieces))

    def __eq__(self, other):
        return isinstance(other, RadialProfile) and self._segments == other._segments

    def __hash__(self):
        return hash(self._segments)

    def __repr__(self):
        parts = []
        for lo, hi, t in self._segments:
            body = " + ".join(
                f"{c:.6g}*r^{s:.6g}" + (f"*ln(r)^{k}" if k else "") for c, s, k in t
            ) or "0"
            parts.append(f"[{lo:.6g},{hi:.6g}): {body}")
        return "RadialProfile(" + "; ".join(parts) + ")"


def _mid(a, b):
    if a == 0.0:
        return b / 2.0 if b < INF else 1.0
    if b == INF:
        return 2.0 * a
    return math.sqrt(a * b)


def _mul_terms(a, b):
    return [(c1 * c2, s1 + s2, k1 + k2) for c1, s1, k1 in a for c2, s2, k2 in b]


def _combine(f, g, op):
    pts = sorted(set(f.breaks[1:-1]) | set(g.breaks[1:-1]))
    breaks = [0.0] + pts + [INF]
    mids = np.array([_mid(breaks[i], breaks[i + 1]) for i in range(len(breaks) - 1)])
    fi, gi = f.segment_index(mids), g.segment_index(mids)
    terms = [op(f.segments[i][2], g.segments[j][2]) for i, j in zip(fi, gi)]
    return RadialProfile.from_segments(breaks, terms)


def _interp_cell(r0, r1, v0, v1):
    if v0 == 0.0 and v1 == 0.0:
        return []
    if v0 * v1 > 0:
        s = math.log(v1 / v0) / math.log(r1 / r0)
        # coefficient v0 r0^-s must stay representable, else fall back to linear
        if abs(math.log(abs(v0)) - s * math.log(r0)) < 650.0:
            return [(v0 / r0**s, s, 0)]
    b = (v1 - v0) / (r1 - r0)
    return [(v0 - b * r0, 0.0, 0), (b, 1.0, 0)]


def _end_power(r0, v0, r1, v1, exponent):
    if v0 == 0.0:
        return []
    if exponent is None:
        if v1 == 0.0 or v0 * v1 < 0:
            return [(v0, 0.0, 0)]
        exponent = math.log(v1 / v0) / math.log(r1 / r0)
    return [(v0 / r0**exponent, float(exponent), 0)]


HEMISPHERES = ("pos", "neg")


@dataclass(frozen=True)
class AngularPattern:
    """Values on the open hemispheres x1 > 0 ('pos') and x1 < 0 ('neg')."""

    value_pos: float = 1.0
    value_neg: float = 1.0

    @property
    def mean(self) -> float:
        return 0.5 * (self.value_pos + self.value_neg)

    @property
    def is_constant(self) -> bool:
        return self.value_pos == self.value_neg

    def value(self, hemisphere: str) -> float:
        if hemisphere not in HEMISPHERES:
            raise ProfileError(f"hemisphere must be 'pos' or 'neg', got {hemisphere!r}")
        return self.value_pos if hemisphere == "pos" else self.value_neg


@dataclass(frozen=True)
class MixedFunction:
    """f(rho theta) = radial(rho) * pattern value on the hemisphere of theta."""

    radial: RadialProfile
    angular: AngularPattern = field(default_factory=AngularPattern)

    def __call__(self, rho, hemisphere="pos"):
        return evaluate(self, rho, hemisphere)

    def __mul__(self, a):
        return MixedFunction(self.radial * float(a), self.angular)

    __rmul__ = __mul__

    @property
    def is_radial(self) -> bool:
        return self.angular.is_constant

    def to_dict(self) -> dict:
        return {
            "pieces": self.radial.to_list(),
            "pattern": [self.angular.value_pos, self.angular.value_neg],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict):
        pat = d.get("pattern", [1.0, 1.0])
        return cls(RadialProfile.from_list(d["pieces"]), AngularPattern(float(pat[0]), float(pat[1])))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    @classmethod
    def radial_power(cls, coeff=1.0, exponent=0.0, lo=0.0, hi=INF, pattern=(1.0, 1.0)):
        return cls(RadialProfile.power(coeff, exponent, lo, hi), AngularPattern(*pattern))


def evaluate(f: MixedFunction, rho, hemisphere: str = "pos"):
    """f at radius rho > 0 on the given hemisphere."""
    if np.any(np.asarray(rho) <= 0):
        raise ProfileError("rho must be positive")
    return f.angular.value(hemisphere) * f.radial(rho)


def angular_lp_norm(pattern: AngularPattern, shift: float, p_tilde: float, n: int) -> float:
    """L^p~ norm over S^{n-1} of the two-value function pattern - shift."""
    if not p_tilde >= 1.0:
        raise ProfileError("angular exponent must be >= 1")
    half = 0.5 * unit_sphere_area(n)
    a = abs(pattern.value_pos - shift)
    b = abs(pattern.value_neg - shift)
    return (half * (a**p_tilde + b**p_tilde)) ** (1.0 / p_tilde)


def scale_argument(f: MixedFunction, t: float) -> MixedFunction:
    """The dilate x -> f(t x); the angular pattern is unchanged."""
    return MixedFunction(f.radial.scale_argument(t), f.angular)
