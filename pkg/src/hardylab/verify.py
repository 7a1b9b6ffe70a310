"""Verification harness: upper-bound batteries, lower-bound sweeps and
extrapolation of measured norm ratios against the closed-form constants."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .extremal import (
    DEFAULT_EPSILONS,
    FamilyUnavailableError,
    default_epsilons,
    extremal_family,
)
from .funcspace import INF, AngularPattern, MixedFunction, RadialProfile
from .norms import NormError, SpaceSpec, herz_norm, morrey_herz_norm, norm, superlevel_intervals
from .operators import (
    WeightFunction,
    apply_conjugate_fractional_hardy,
    apply_fractional_hardy,
    apply_mlinear_hardy,
    apply_ray_average,
    apply_spherical_hardy,
    apply_weighted_average,
    fractional_hardy_numeric,
)
from .quadrature import DEFAULT_GRID, DivergenceError, QuadGrid
from .sharpconst import (
    EQUIVALENCE_WINDOW,
    FormulaUndefinedError,
    TheoremCase,
    constant_type,
    sharp_constant,
    validate,
)
from .special import unit_ball_volume, unit_sphere_area

__all__ = [
    "VerifyError",
    "ZeroSourceError",
    "VerifyConfig",
    "Sample",
    "VerificationReport",
    "measure_ratio",
    "extrapolate",
    "sweep_and_extrapolate",
    "random_admissible",
    "verify_theorem",
    "param_hash",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("theorem", "param_hash", "epsilon", "ratio", "constant", "upper_ok", "lower_ok", "verdict")


class VerifyError(ValueError):
    pass


class ZeroSourceError(VerifyError):
    pass


@dataclass(frozen=True)
class VerifyConfig:
    grid: QuadGrid = DEFAULT_GRID
    tol_upper: float = 1e-3
    tol_lower: float = 2e-2
    epsilons: tuple = DEFAULT_EPSILONS
    battery: int = 25
    seed: int = 0
    operator: str = "ray"  # T3.3 only: 'ray' or 'literal'
    error_estimates: bool = False

    def __post_init__(self):
        if not (self.tol_upper > 0 and self.tol_lower > 0):
            raise VerifyError("tolerances must be positive")
        if self.grid.points_per_decade < 16:
            raise VerifyError("points_per_decade must be >= 16")
        if self.operator not in ("ray", "literal"):
            raise VerifyError("operator must be 'ray' or 'literal'")
        if self.battery < 0:
            raise VerifyError("battery size must be >= 0")


@dataclass
class Sample:
    label: str
    ratio: float
    error_estimate: float | None = None
    epsilon: float | None = None


@dataclass
class VerificationReport:
    case: TheoremCase
    constant: float
    constant_type: str
    samples: list = field(default_factory=list)
    extrapolated_ratio: float | None = None
    upper_bound_ok: bool = False
    lower_bound_ok: bool | None = None
    discrepancies: list = field(default_factory=list)
    runtime_seconds: float = 0.0
    seed: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.upper_bound_ok and self.lower_bound_ok is not False

    def summary(self) -> str:
        lb = "N/A" if self.lower_bound_ok is None else ("ok" if self.lower_bound_ok else "FAIL")
        ext = "N/A" if self.extrapolated_ratio is None else f"{self.extrapolated_ratio:.10g}"
        return (
            f"{'PASS' if self.passed else 'FAIL'} theorem={self.case.theorem_id} "
            f"C={self.constant:.10g} extrapolated={ext} lower_bound={lb}"
        )

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "theorem": self.case.theorem_id,
            "params": dict(sorted(self.case.params.items())),
            "param_hash": param_hash(self.case),
            "constant": self.constant,
            "constant_type": self.constant_type,
            "samples": [
                {"label": s.label, "epsilon": s.epsilon, "ratio": s.ratio, "error_estimate": s.error_estimate}
                for s in self.samples
            ],
            "extrapolated_ratio": self.extrapolated_ratio,
            "upper_bound_ok": self.upper_bound_ok,
            "lower_bound_ok": self.lower_bound_ok,
            "passed": self.passed,
            "discrepancies": list(self.discrepancies),
            "seed": self.seed,
            "details": self.details,
        }
        if timing:
            d["runtime_seconds"] = self.runtime_seconds
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(_clean(self.to_dict(timing)), indent=2, sort_keys=False)

    def csv_rows(self) -> list:
        h = param_hash(self.case)
        lb = "" if self.lower_bound_ok is None else str(self.lower_bound_ok)
        verdict = "PASS" if self.passed else "FAIL"
        rows = []
        for s in self.samples:
            rows.append(
                [self.case.theorem_id, h, _fmt(s.epsilon) if s.epsilon is not None else s.label,
                 _fmt(s.ratio), _fmt(self.constant), str(self.upper_bound_ok), lb, verdict]
            )
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.csv_rows())
        return buf.getvalue()


def _fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def param_hash(case: TheoremCase) -> str:
    key = json.dumps([case.theorem_id, sorted((k, float(v)) for k, v in case.params.items())])
    return hashlib.sha256(key.encode()).hexdigest()[:12]


# per-theorem setup --------------------------------------------------------

@dataclass
class _Setup:
    apply: object  # f -> output
    source: object  # f -> source norm
    target: object  # output -> target norm
    windows: list  # per input: (head_lo, tail_hi, rad_space)
    arity: int = 1


def _lebesgue_window(n, p, w):
    c = -(n + w) / p
    return (c, c)


def _setup(case: TheoremCase, config: VerifyConfig) -> _Setup:
    P, tid, grid = case.params, case.theorem_id, config.grid
    nrm = lambda f, spec, **kw: norm(f, spec, grid, **kw)  # noqa: E731
    if tid == "T2.1":
        m = P["m"]
        specs = [
            (P[f"n{i}"], SpaceSpec.lebesgue(P[f"n{i}"], P[f"p{i}"], P[f"pt{i}"], P[f"alpha{i}"]),
             SpaceSpec.lebesgue(P[f"n{i}"], P[f"p{i}"], P[f"q{i}"], P[f"alpha{i}"]))
            for i in range(1, m + 1)
        ]
        return _Setup(
            lambda fs: tuple(apply_spherical_hardy(f, d) for f, (d, _, _) in zip(fs, specs)),
            lambda fs: math.prod(nrm(f, s) for f, (_, s, _) in zip(fs, specs)),
            lambda hs: math.prod(nrm(h, t) for h, (_, _, t) in zip(hs, specs)),
            [_lebesgue_window(P[f"n{i}"], P[f"p{i}"], P[f"alpha{i}"]) for i in range(1, m + 1)],
            arity=m,
        )
    n = P.get("n")
    if tid in ("T3.1", "T3.2"):
        m = P["m"]
        if m > 2:
            raise VerifyError(f"{tid} verification is implemented for m <= 2")
        p = P["p"]
        if tid == "T3.1":
            tgt = SpaceSpec.lebesgue(n, p, P["pt"], P["alpha"])
            ws = [P[f"alpha{i}"] * P[f"p{i}"] / p for i in range(1, m + 1)]
            srcs = [SpaceSpec.lebesgue(n, P[f"p{i}"], P[f"pt{i}"], w) for i, w in zip(range(1, m + 1), ws)]
            wins = [_lebesgue_window(n, P[f"p{i}"], w) for i, w in zip(range(1, m + 1), ws)]
        else:
            tgt = _morrey_or_lebesgue(n, p, P["pt"], P["lam"])
            srcs = [_morrey_or_lebesgue(n, P[f"p{i}"], P[f"pt{i}"], P[f"lam{i}"]) for i in range(1, m + 1)]
            wins = [(n * P[f"lam{i}"], n * P[f"lam{i}"]) for i in range(1, m + 1)]
        if m == 1:
            return _Setup(
                lambda f: apply_spherical_hardy(f, n),
                lambda f: nrm(f, srcs[0]),
                lambda h: nrm(h, tgt),
                wins,
            )
        return _Setup(
            lambda fs: apply_mlinear_hardy(fs, n, grid),
            lambda fs: nrm(fs[0], srcs[0]) * nrm(fs[1], srcs[1]),
            lambda h: nrm(h, tgt),
            wins,
            arity=2,
        )
    if tid == "T3.3":
        lam = P["lam"]
        spec = SpaceSpec.lambda_cmo(n, P["p"], P["pt"], lam)
        op = apply_ray_average if config.operator == "ray" else apply_spherical_hardy
        return _Setup(lambda f: op(f, n), lambda f: nrm(f, spec), lambda h: nrm(h, spec), [(n * lam, n * lam)])
    if tid.startswith("T4"):
        b = P["beta"]
        if tid == "T4.1":
            src = SpaceSpec.lebesgue(n, P["p1"], P["pt1"])
            tgt = SpaceSpec.lebesgue(n, P["p2"], P["pt2"])
        elif tid == "T4.2":
            src = SpaceSpec.lebesgue(n, P["p1"], P["pt1"], P["alpha1"])
            tgt = SpaceSpec.weak(n, P["p2"], P["pt2"], P["alpha2"])
        elif tid == "T4.3":
            src = SpaceSpec.lebesgue(n, 1.0, P["pt1"])
            tgt = SpaceSpec.weak(n, P["p2"], P["pt2"], P["alpha2"])
        elif tid == "T4.4":
            src = SpaceSpec.lebesgue(n, P["p1"], P["pt1"], P["alpha"])
            tgt = SpaceSpec.weak(n, P["p2"], P["pt2"], P["alpha1"])
        else:
            src = SpaceSpec.lebesgue(n, 1.0, P["pt1"], P["alpha"])
            tgt = SpaceSpec.weak(n, P["p"], P["pt2"], P["alpha1"])
        if tid in ("T4.1", "T4.2", "T4.3"):
            op = lambda f: apply_fractional_hardy(f, n, b)  # noqa: E731
        else:
            op = lambda f: apply_conjugate_fractional_hardy(f, n, b)  # noqa: E731
        win = _lebesgue_window(n, src.p, src.alpha)
        if tid in ("T4.4", "T4.5"):
            win = (win[0], min(win[1], -b))
        return _Setup(op, lambda f: nrm(f, src), lambda h: nrm(h, tgt), [win])
    # T5
    psi = WeightFunction.power(P["psi_coeff"], P["sigma"])
    variant = tid[-1]
    a, p = P["alpha"], P["p"]
    if tid.startswith("T5.2"):
        spec = SpaceSpec.herz(n, a, P["q"], p, P["pt"])
        c = -a - n / p
    else:
        spec = SpaceSpec.morrey_herz(n, a, P["q"], P["lam"], p, P["pt"])
        c = P["lam"] - a - n / p
    return _Setup(
        lambda f: apply_weighted_average(f, psi, n, variant, grid),
        lambda f: nrm(f, spec),
        lambda h: nrm(h, spec),
        [(c, c)],
    )


def _morrey_or_lebesgue(n, p, pt, lam):
    # at lambda = -1/p the central Morrey space is L^p
    if lam <= -1.0 / p:
        return SpaceSpec.lebesgue(n, p, pt)
    return SpaceSpec.morrey(n, p, pt, lam)


def measure_ratio(case: TheoremCase, f, config: VerifyConfig | None = None) -> float:
    """||T f||_target / ||f||_source for the operator and spaces of ``case``."""
    config = config or VerifyConfig()
    if not case.side_conditions_checked:
        case = validate(case)
    s = _setup(case, config)
    src = s.source(f)
    if not src > 0:
        raise ZeroSourceError("source norm is zero")
    if not math.isfinite(src):
        raise DivergenceError("source norm is infinite", "source")
    tgt = s.target(s.apply(f))
    if not math.isfinite(tgt):
        raise NormError(f"target norm is not finite ({tgt})")
    return tgt / src


def _eigen_ratio(case: TheoremCase, f, config: VerifyConfig) -> float:
    """Truncated-shell ratio for Herz-type eigenfunctions, whose full norms
    diverge (Herz) or sit on a limit (Morrey-Herz)."""
    s = _setup(case, config)
    P, n = case.params, case.params["n"]
    h = s.apply(f)
    if case.theorem_id.startswith("T5.2"):
        spec = SpaceSpec.herz(n, P["alpha"], P["q"], P["p"], P["pt"])
        return herz_norm(h, spec, grid=config.grid, tails=False) / herz_norm(f, spec, grid=config.grid, tails=False)
    spec = SpaceSpec.morrey_herz(n, P["alpha"], P["q"], P["lam"], P["p"], P["pt"])
    return morrey_herz_norm(h, spec, grid=config.grid, tails=False) / morrey_herz_norm(
        f, spec, grid=config.grid, tails=False
    )


# extrapolation ------------------------------------------------------------

def extrapolate(epsilons, ratios):
    """Fit ratio(eps) = C - a eps^theta through the last three points.

    Falls back to the last ratio when fewer than three points are given or
    the sequence is not monotone.
    """
    eps = [float(e) for e in epsilons]
    r = [float(x) for x in ratios]
    if not r:
        raise VerifyError("nothing to extrapolate")
    if len(r) < 3:
        return r[-1]
    (e1, e2, e3), (r1, r2, r3) = eps[-3:], r[-3:]
    d1, d2 = r2 - r1, r3 - r2
    if d1 == 0.0 and d2 == 0.0:
        return r3
    if d1 == 0.0 or d2 / d1 <= 0.0 or abs(d2) >= abs(d1):
        return r3
    target = d2 / d1

    def g(th):
        return (e2**th - e3**th) / (e1**th - e2**th) - target

    try:
        lo, hi = 1e-3, 20.0
        if g(lo) * g(hi) > 0:
            return r3
        th = brentq(g, lo, hi, xtol=1e-14)
    except (ValueError, ZeroDivisionError, OverflowError):
        return r3
    a = d1 / (e1**th - e2**th)
    return r3 + a * e3**th


def sweep_and_extrapolate(case: TheoremCase, epsilons=None, config: VerifyConfig | None = None):
    """Measured ratios over an epsilon sweep and their extrapolated limit."""
    config = config or VerifyConfig()
    if not case.side_conditions_checked:
        case = validate(case)
    fam = extremal_family(case)
    if not fam.indexed:
        r = measure_ratio(case, fam(), config)
        return [r], r
    eps = default_epsilons(fam, epsilons if epsilons is not None else config.epsilons)
    if not eps:
        raise VerifyError(f"no epsilon below epsilon_max = {fam.epsilon_max:g}")
    ratios = [measure_ratio(case, fam(e), config) for e in eps]
    return ratios, extrapolate(eps, ratios)


# random battery -----------------------------------------------------------

def _random_profile(rng, window, span=1.5, margin=0.05, full_support=False):
    """1-4 power pieces; head and tail exponents inside the window.

    With ``full_support`` the profile has power-law pieces reaching both 0
    and infinity (2-4 pieces)."""
    head_lo, tail_hi = window
    k = int(rng.integers(2 if full_support else 1, 5))
    breaks = np.sort(10.0 ** rng.uniform(-2.0, 2.0, size=k + 1))
    lo_open = full_support or rng.random() < 0.5
    hi_open = full_support or rng.random() < 0.5
    edges = list(breaks)
    if lo_open:
        edges[0] = 0.0
    if hi_open:
        edges[-1] = INF
    segs = []
    for i in range(k):
        if i == 0 and lo_open:
            s = rng.uniform(head_lo + margin, head_lo + span)
        elif i == k - 1 and hi_open:
            s = rng.uniform(tail_hi - span, tail_hi - margin)
        else:
            mid = 0.5 * (head_lo + tail_hi)
            s = rng.uniform(mid - span, mid + span)
        if k == 1 and lo_open and hi_open:
            # a single power cannot sit in both windows; cut the tail
            edges[-1] = float(breaks[-1])
        c = 10.0 ** rng.uniform(-2.0, 2.0)
        segs.append([(c, float(s), 0)])
    if edges[0] > 0.0:
        edges.insert(0, 0.0)
        segs.insert(0, [])
    if edges[-1] < INF:
        edges.append(INF)
        segs.append([])
    return RadialProfile.from_segments(edges, segs)


def random_admissible(case: TheoremCase, rng, config: VerifyConfig | None = None):
    """A random admissible input (a tuple for two-input operators)."""
    config = config or VerifyConfig()
    if not case.side_conditions_checked:
        case = validate(case)
    s = _setup(case, config)
    out = []
    # Herz-type equivalence checks use profiles with power-law ends: thin
    # compactly supported shells make ||U f|| / ||f|| arbitrarily small
    full = case.theorem_id.startswith("T5")
    for win in s.windows:
        g = _random_profile(rng, win, full_support=full)
        u = float(rng.uniform(-1.0, 1.0)) if case.theorem_id == "T3.3" else float(rng.uniform(0.1, 1.0))
        pat = AngularPattern(1.0, u) if rng.random() < 0.5 else AngularPattern(1.0, 1.0)
        out.append(MixedFunction(g, pat))
    return tuple(out) if s.arity > 1 or case.theorem_id == "T2.1" else out[0]


# closed-form side checks ---------------------------------------------------

def _t43_closed_form(case, config):
    """Pointwise check of the ball-indicator image against direct quadrature."""
    P = case.params
    n, b = P["n"], P["beta"]
    chi = MixedFunction(RadialProfile.indicator(0.0, 1.0), AngularPattern())
    r = np.geomspace(1e-2, 1e2, 50)
    closed = unit_ball_volume(n) ** (b / n) * np.where(r < 1.0, r**b, r ** (b - n))
    numeric = fractional_hardy_numeric(chi, n, b, r, config.grid)
    exact = apply_fractional_hardy(chi, n, b).radial(r)
    return {
        "closed_vs_quadrature_max_rel": float(np.max(np.abs(numeric - closed) / closed)),
        "closed_vs_exact_max_rel": float(np.max(np.abs(exact - closed) / closed)),
    }


def _t44_level_check(case, config):
    """Above the peak P0 = H*(f0)(1) the superlevel sets are empty."""
    P = case.params
    n, b = P["n"], P["beta"]
    f0 = extremal_family(case)()
    h = apply_conjugate_fractional_hardy(f0, n, b)
    P0 = float(h.radial(1.0))
    spec = SpaceSpec.weak(n, P["p2"], P["pt2"], P["alpha1"])
    levels = P0 * np.array([1.0, 1.0 + 1e-9, 1.5, 10.0])
    measures = []
    for L in levels:
        iv = superlevel_intervals(h.radial, float(L))
        measures.append(sum(hi - lo for lo, hi in iv))
    return {"P0": P0, "empty_above_P0": all(m == 0.0 for m in measures), "weak_norm": norm(h, spec, config.grid)}


# main entry ---------------------------------------------------------------

def verify_theorem(case: TheoremCase, config: VerifyConfig | None = None) -> VerificationReport:
    config = config or VerifyConfig()
    t0 = time.perf_counter()
    case = validate(case)
    tid, P = case.theorem_id, case.params
    ctype = constant_type(tid)
    two_variants = tid in ("T3.1", "T3.2") and P["m"] == 2
    printed_note = None
    try:
        C = sharp_constant(case)
    except FormulaUndefinedError as exc:
        if not two_variants:
            raise
        C = sharp_constant(case, "derived")
        printed_note = str(exc)
    rep = VerificationReport(case, C, ctype, seed=config.seed)
    _setup(case, config)  # fails early for unsupported cases
    rng = np.random.default_rng(config.seed)
    measured = []

    # T3.1 / T3.2 with m = 2: keep both constant readings and let the
    # extremal measurement pick
    if two_variants:
        rep.details["constant_printed"] = None if printed_note else C
        rep.details["constant_derived"] = sharp_constant(case, "derived")
        if printed_note:
            rep.discrepancies.append(printed_note + "; the derived constant is used")

    # extremal side
    fam = None
    try:
        fam = extremal_family(case)
    except FamilyUnavailableError as exc:
        rep.discrepancies.append(f"lower bound not applicable: {exc}")
    if fam is not None and fam.degenerate:
        rep.discrepancies.append(
            "extremal pattern (1, (-1)^n) is radial for even n; the ball mean does not vanish"
        )
    ext_ratios, ext_eps = [], []
    if fam is not None:
        eps_list = default_epsilons(fam, config.epsilons) if fam.indexed else [None]
        for e in eps_list:
            f = fam(e)
            try:
                if tid.startswith("T5"):
                    r = _eigen_ratio(case, f, config)
                else:
                    r = measure_ratio(case, f, config)
            except (DivergenceError, NormError, OverflowError) as exc:
                rep.discrepancies.append(f"extremal at eps={e}: {exc}")
                continue
            err = None
            if config.error_estimates or fam.indexed is False:
                try:
                    c2 = replace(config, grid=config.grid.doubled())
                    r2 = _eigen_ratio(case, f, c2) if tid.startswith("T5") else measure_ratio(case, f, c2)
                    err = abs(r2 - r)
                except (DivergenceError, NormError, OverflowError):
                    err = None
            rep.samples.append(Sample("extremal" if e is None else f"eps={e:g}", r, err, e))
            ext_ratios.append(r)
            ext_eps.append(e)
            measured.append(r)

    # literal ball average on the signed extremal
    if tid == "T3.3":
        f0 = fam()
        lit = apply_spherical_hardy(f0, P["n"])
        rr = np.geomspace(1e-6, 1e6, 97)
        mx = float(np.max(np.abs(lit.radial(rr))))
        rep.details["literal_operator_max_abs"] = mx
        rep.details["operator"] = config.operator
        if f0.angular.mean == 0.0 and mx <= 1e-14:
            rep.discrepancies.append(
                "literal ball average annihilates the odd-pattern extremal (H f0 = 0); "
                "the eigen-identity H f0 = f0/(1+lambda) holds only for the pattern-preserving ray average"
            )

    # random upper-bound battery
    battery = []
    for i in range(config.battery):
        f = random_admissible(case, rng, config)
        try:
            r = measure_ratio(case, f, config)
        except ZeroSourceError:
            continue
        except (DivergenceError, NormError, OverflowError) as exc:
            rep.discrepancies.append(f"random#{i}: {exc}")
            continue
        rep.samples.append(Sample(f"random#{i}", r))
        battery.append(r)
        measured.append(r)

    if ext_ratios:
        if fam.indexed and len(ext_ratios) >= 1:
            rep.extrapolated_ratio = extrapolate(ext_eps, ext_ratios)
        else:
            rep.extrapolated_ratio = ext_ratios[-1]

    if two_variants and rep.extrapolated_ratio is not None and not printed_note:
        d_pr = abs(rep.extrapolated_ratio - rep.details["constant_printed"])
        d_de = abs(rep.extrapolated_ratio - rep.details["constant_derived"])
        best = "printed" if d_pr <= d_de else "derived"
        rep.details["better_match"] = best
        if best == "derived":
            rep.constant = C = rep.details["constant_derived"]
            rep.discrepancies.append(
                "m = 2 measurement matches the derived constant, not the printed Gamma quotient"
            )

    if ctype == "exact":
        rep.upper_bound_ok = all(r <= C * (1.0 + config.tol_upper) for r in measured)
        if fam is None:
            rep.lower_bound_ok = None
        elif rep.extrapolated_ratio is None:
            rep.lower_bound_ok = False
        else:
            rep.lower_bound_ok = rep.extrapolated_ratio >= C * (1.0 - config.tol_lower)
    else:
        lo, hi = EQUIVALENCE_WINDOW
        rep.upper_bound_ok = all(C * lo <= r <= C * hi for r in measured)
        if rep.extrapolated_ratio is not None:
            rep.details["eigen_ratio_rel_error"] = abs(rep.extrapolated_ratio - C) / C
        rep.lower_bound_ok = (
            False if rep.extrapolated_ratio is None else C * lo <= rep.extrapolated_ratio <= C * hi
        )
        # moment finiteness (checked by validate) must match the operator
        # acting without divergence on the eigenfunction
        rep.details["moment_finite"] = True
        rep.details["operator_finite_on_eigenfunction"] = bool(ext_ratios)
        if not ext_ratios:
            rep.discrepancies.append("moment integral finite but the operator diverged on the eigenfunction")

    if tid == "T3.2":
        _t32_norm_note(case, rep)
    if tid == "T4.3":
        rep.details.update(_t43_closed_form(case, config))
    if tid == "T4.4":
        rep.details.update(_t44_level_check(case, config))
    rep.details["battery_size"] = len(battery)
    if battery:
        rep.details["battery_max_ratio"] = max(battery)
    rep.runtime_seconds = time.perf_counter() - t0
    return rep


def _t32_norm_note(case, rep):
    """Compare the Morrey norm of r^{n lambda} with the shortened closed form
    omega^{1/pt}/(n(1+lambda p)) that omits the volume factor and root."""
    P = case.params
    n = P["n"]
    for i in range(1, P["m"] + 1):
        p, pt, lam = P[f"p{i}"], P[f"pt{i}"], P[f"lam{i}"]
        if lam <= -1.0 / p:
            continue
        om = unit_sphere_area(n)
        direct = om ** (1.0 / pt) * (1.0 / (unit_ball_volume(n) * n * (1.0 + lam * p))) ** (1.0 / p)
        short = om ** (1.0 / pt) / (n * (1.0 + lam * p))
        rep.details[f"morrey_norm_eigen{i}"] = direct
        if abs(direct - short) > 1e-12 * direct:
            rep.discrepancies.append(
                f"Morrey norm of r^(n lambda{i}) is {direct:.12g}; the shortened form "
                f"omega^(1/pt)/(n(1+lambda p)) = {short:.12g} differs (the ratio is unaffected)"
            )
