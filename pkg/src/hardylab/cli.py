"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 validation failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .extremal import DEFAULT_EPSILONS, ExtremalError, make_extremal
from .funcspace import MixedFunction, ProfileError
from .norms import NormError, SpaceError, SpaceSpec, norm_record
from .operators import OperatorError, OperatorSpec, WeightFunction, apply_operator
from .quadrature import DEFAULT_GRID, DivergenceError, QuadGrid
from .sharpconst import (
    THEOREMS,
    ParameterError,
    TheoremCase,
    constant_type,
    sharp_constant,
    validate,
)
from .verify import VerifyConfig, VerifyError, param_hash, verify_theorem

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_USAGE = 0, 1, 2, 64
MAX_SWEEP = 10_000

SWEEP_COLUMNS = (
    "theorem", "param_hash", "params", "constant", "constant_type",
    "extrapolated", "upper_ok", "lower_ok", "verdict",
)

# flag name -> TheoremCase parameter name
_PARAM_FLAGS = {
    "n": "n", "m": "m", "n1": "n1", "n2": "n2",
    "p": "p", "p1": "p1", "p2": "p2",
    "pt": "pt", "pt1": "pt1", "pt2": "pt2",
    "q": "q", "q1": "q1", "q2": "q2",
    "alpha": "alpha", "alpha1": "alpha1", "alpha2": "alpha2",
    "lambda": "lam", "lambda1": "lam1", "lambda2": "lam2",
    "beta": "beta", "psi_sigma": "sigma", "psi_coeff": "psi_coeff",
}

_EPILOG = (
    "exit codes: 0 ok, 1 verification failure, 2 validation failure, 64 usage error.\n"
    "sweep CSV columns: " + ",".join(SWEEP_COLUMNS) + "\n"
    "verify CSV columns: theorem,param_hash,epsilon,ratio,constant,upper_ok,lower_ok,verdict\n"
    "numbers are written with '.' decimals and 17 significant digits."
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    r_min: float = DEFAULT_GRID.r_min
    r_max: float = DEFAULT_GRID.r_max
    points_per_decade: int = DEFAULT_GRID.points_per_decade
    tol_upper: float = 1e-3
    tol_lower: float = 2e-2
    epsilons: tuple = DEFAULT_EPSILONS
    fmt: str = "text"
    out: str | None = None
    seed: int = 0
    jobs: int = 1
    battery: int = 25
    operator: str = "ray"
    timing: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.points_per_decade < 16:
            raise UsageError("--grid-ppd must be >= 16")
        if not (self.tol_upper > 0 and self.tol_lower > 0):
            raise UsageError("tolerances must be > 0")
        if not (0 < self.r_min < self.r_max):
            raise UsageError("need 0 < r_min < r_max")
        if self.fmt not in ("text", "json", "csv"):
            raise UsageError("--format must be text, json or csv")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if any(not e > 0 for e in self.epsilons):
            raise UsageError("epsilons must be > 0")

    @property
    def grid(self) -> QuadGrid:
        return QuadGrid(self.r_min, self.r_max, self.points_per_decade, DEFAULT_GRID.order)

    def verify_config(self) -> VerifyConfig:
        return VerifyConfig(
            grid=self.grid,
            tol_upper=self.tol_upper,
            tol_lower=self.tol_lower,
            epsilons=tuple(self.epsilons),
            battery=self.battery,
            seed=self.seed,
            operator=self.operator,
        )


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _parse_number(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"--{key.replace('_', '-')}: not a number: {text!r}") from None


def _parse_values(text: str, key: str) -> list:
    """'a', 'a,b,c' or 'start:stop:step' (inclusive) for sweeps."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"--{key}: range must be start:stop:step")
        a, b, h = (_parse_number(x, key) for x in parts)
        if h == 0:
            raise UsageError(f"--{key}: step must be nonzero")
        count = math.floor((b - a) / h + 1e-9) + 1
        if count > MAX_SWEEP:
            raise UsageError(f"--{key}: range has more than {MAX_SWEEP} values")
        return [round(a + i * h, 12) for i in range(max(count, 0))]
    if text == "":
        return []
    return [_parse_number(x, key) for x in text.split(",")]


def _add_param_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("theorem parameters")
    for flag in _PARAM_FLAGS:
        g.add_argument("--" + flag.replace("_", "-"), dest=flag, default=None, metavar="X")


def _add_run_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", default=None, help="JSON file with the same keys as the flags")
    g.add_argument("--eps-list", dest="eps_list", default=None, help="comma-separated epsilons")
    g.add_argument("--grid-ppd", dest="grid_ppd", type=int, default=None)
    g.add_argument("--r-min", dest="r_min", type=float, default=None)
    g.add_argument("--r-max", dest="r_max", type=float, default=None)
    g.add_argument("--tol-upper", dest="tol_upper", type=float, default=None)
    g.add_argument("--tol-lower", dest="tol_lower", type=float, default=None)
    g.add_argument("--format", dest="format", choices=("text", "json", "csv"), default=None)
    g.add_argument("--out", default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--jobs", type=int, default=None)
    g.add_argument("--battery", type=int, default=None, help="random test functions per case")
    g.add_argument("--operator", choices=("ray", "literal"), default=None, help="T3.3 operator variant")
    g.add_argument("--timing", action="store_true", help="include runtimes in JSON reports")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="hardylab",
        description="Sharp constants for Hardy-type operators on mixed radial-angular spaces.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("constants", help="validate a case and print its constant", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    c.add_argument("theorem", choices=THEOREMS)
    c.add_argument("--variant", choices=("printed", "derived"), default="printed")
    _add_param_flags(c)
    _add_run_flags(c)

    v = sub.add_parser("verify", help="run the verification harness on one case", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    v.add_argument("theorem", choices=THEOREMS)
    _add_param_flags(v)
    _add_run_flags(v)

    s = sub.add_parser("sweep", help="verify a grid of cases into one CSV table", epilog=_EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("theorem", choices=THEOREMS)
    _add_param_flags(s)
    _add_run_flags(s)

    e = sub.add_parser("extremal", help="dump an extremal function as JSON")
    e.add_argument("theorem", choices=THEOREMS)
    e.add_argument("--eps", type=float, default=None)
    _add_param_flags(e)
    _add_run_flags(e)

    nm = sub.add_parser("norm", help="evaluate a norm of a function given as JSON")
    nm.add_argument("--space", required=True,
                    choices=("lebesgue", "weak", "morrey", "cmo", "lambda_cmo", "herz", "morrey_herz"))
    nm.add_argument("--function", required=True, help="JSON file, or '-' for stdin")
    _add_param_flags(nm)
    _add_run_flags(nm)

    a = sub.add_parser("apply", help="apply an operator to a function given as JSON")
    a.add_argument("--kind", required=True,
                   choices=("spherical", "ray", "fractional", "conjugate", "U", "V"))
    a.add_argument("--function", required=True, help="JSON file, or '-' for stdin")
    _add_param_flags(a)
    _add_run_flags(a)

    sc = sub.add_parser("selfcheck", help="run the invariant battery")
    _add_run_flags(sc)
    return ap


def _load_config(args) -> dict:
    if not getattr(args, "config", None):
        return {}
    try:
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _merged(args, cfg: dict, key: str):
    v = getattr(args, key, None)
    return v if v is not None else cfg.get(key)


def run_config(args, cfg: dict) -> RunConfig:
    kw = {}
    pairs = {
        "grid_ppd": "points_per_decade", "r_min": "r_min", "r_max": "r_max",
        "tol_upper": "tol_upper", "tol_lower": "tol_lower", "format": "fmt", "out": "out",
        "seed": "seed", "jobs": "jobs", "battery": "battery", "operator": "operator",
    }
    for flag, name in pairs.items():
        v = _merged(args, cfg, flag)
        if v is not None:
            kw[name] = v
    eps = _merged(args, cfg, "eps_list")
    if eps is not None:
        vals = eps if isinstance(eps, list) else _parse_values(str(eps), "eps-list")
        kw["epsilons"] = tuple(float(x) for x in vals)
    if getattr(args, "timing", False) or cfg.get("timing"):
        kw["timing"] = True
    try:
        return RunConfig(**kw)
    except TypeError as exc:
        raise UsageError(str(exc)) from None


def _raw_params(args, cfg: dict) -> dict:
    out = {}
    for flag, key in _PARAM_FLAGS.items():
        v = _merged(args, cfg, flag)
        if v is not None:
            out[key] = v
    return out


_FLAG_OF = {v: k for k, v in _PARAM_FLAGS.items()}


def _single_params(raw: dict) -> dict:
    return {k: _parse_number(str(v), _FLAG_OF.get(k, k)) for k, v in raw.items()}


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# commands -----------------------------------------------------------------

def cmd_constants(theorem: str, params: dict, rc: RunConfig, variant: str = "printed") -> int:
    try:
        case = validate(TheoremCase(theorem, params))
        value = sharp_constant(case, variant)
    except ParameterError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    rec = {
        "theorem": theorem,
        "params": dict(sorted(case.params.items())),
        "constant": value,
        "type": constant_type(theorem),
        "variant": variant,
    }
    if rc.fmt == "json":
        _emit(json.dumps(rec, indent=2) + "\n", rc.out)
    elif rc.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem", "constant", "type", "variant", "params"])
        w.writerow([theorem, _fmt(value), rec["type"], variant, _params_text(case.params)])
        _emit(buf.getvalue(), rc.out)
    else:
        lines = [
            f"theorem   {theorem}",
            f"constant  {_fmt(value)}",
            f"type      {rec['type']}",
            f"variant   {variant}",
            f"params    {_params_text(case.params)}",
        ]
        _emit("\n".join(lines) + "\n", rc.out)
    return EXIT_OK


def _params_text(P: dict) -> str:
    return ";".join(f"{k}={_fmt(float(v))}" for k, v in sorted(P.items()))


def _summary_stream(rc: RunConfig):
    # a report written to stdout keeps it machine readable; summaries then go to stderr
    return sys.stderr if rc.fmt != "text" and not rc.out else sys.stdout


def cmd_verify(theorem: str, params: dict, rc: RunConfig) -> int:
    try:
        case = validate(TheoremCase(theorem, params))
    except ParameterError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        rep = verify_theorem(case, rc.verify_config())
    except (VerifyError, ExtremalError, DivergenceError, NormError, SpaceError, OperatorError) as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for d in rep.discrepancies:
        print(f"note: {d}", file=sys.stderr)
    if rc.out or rc.fmt != "text":
        text = rep.to_csv() if rc.fmt == "csv" else rep.to_json(rc.timing) + "\n"
        _emit(text, rc.out)
    print(rep.summary(), file=_summary_stream(rc))
    return EXIT_OK if rep.passed else EXIT_FAIL


def _sweep_one(args):
    theorem, params, vc = args
    try:
        case = validate(TheoremCase(theorem, params))
    except ParameterError:
        return (theorem, params, None, "SKIPPED(validation)")
    try:
        rep = verify_theorem(case, vc)
    except (VerifyError, ExtremalError, DivergenceError, NormError, SpaceError, OperatorError) as exc:
        return (theorem, case.params, None, f"ERROR({type(exc).__name__})")
    return (theorem, case.params, rep, "PASS" if rep.passed else "FAIL")


def sweep_cases(theorem: str, raw: dict) -> list:
    keys = sorted(raw)
    values = [_parse_values(str(raw[k]), _FLAG_OF.get(k, k)) for k in keys]
    total = math.prod(len(v) for v in values) if values else 1
    if total > MAX_SWEEP:
        raise UsageError(f"sweep grid has {total} cases; the limit is {MAX_SWEEP}")
    return [dict(zip(keys, combo)) for combo in itertools.product(*values)]


def cmd_sweep(theorem: str, raw: dict, rc: RunConfig) -> int:
    cases = sweep_cases(theorem, raw)
    vc = rc.verify_config()
    work = [(theorem, p, vc) for p in cases]
    if rc.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=rc.jobs) as ex:
            results = list(ex.map(_sweep_one, work))
    else:
        results = [_sweep_one(w) for w in work]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    status = EXIT_OK
    summary = _summary_stream(rc)

    for theorem_, params, rep, verdict in results:
        if rep is None:
            w.writerow([theorem_, param_hash(TheoremCase(theorem_, params)), _params_text(params),
                        "", "", "", "", "", verdict])
            print(f"{verdict} theorem={theorem_} {_params_text(params)}", file=summary)
            if verdict.startswith("ERROR"):
                status = EXIT_FAIL
            continue
        lb = "" if rep.lower_bound_ok is None else str(rep.lower_bound_ok)
        w.writerow([
            theorem_, param_hash(rep.case), _params_text(rep.case.params), _fmt(rep.constant),
            rep.constant_type, "" if rep.extrapolated_ratio is None else _fmt(rep.extrapolated_ratio),
            str(rep.upper_bound_ok), lb, verdict,
        ])
        print(rep.summary(), file=summary)
        if not rep.passed:
            status = EXIT_FAIL
    if rc.out:
        _emit(buf.getvalue(), rc.out)
    elif rc.fmt == "csv":
        sys.stdout.write(buf.getvalue())
    return status


def cmd_extremal(theorem: str, params: dict, eps, rc: RunConfig) -> int:
    try:
        case = validate(TheoremCase(theorem, params))
        f = make_extremal(case, eps)
    except ParameterError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ExtremalError as exc:
        print(f"extremal unavailable: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(f, tuple):
        data = [g.to_dict() for g in f]
    else:
        data = f.to_dict()
    _emit(json.dumps({"theorem": theorem, "epsilon": eps, "function": data}, indent=2) + "\n", rc.out)
    return EXIT_OK


def _read_function(path: str) -> MixedFunction:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        data = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read function {path}: {exc}") from None
    if isinstance(data, dict) and "function" in data:
        data = data["function"]
    try:
        return MixedFunction.from_dict(data)
    except (ProfileError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed function JSON: {exc}") from None


def cmd_norm(space: str, path: str, params: dict, rc: RunConfig) -> int:
    f = _read_function(path)
    n = int(params.get("n", 2))
    p, pt = params.get("p", 2.0), params.get("pt", 2.0)
    try:
        spec = SpaceSpec(
            space, n, p, pt,
            alpha=params.get("alpha", 0.0), lam=params.get("lam", 0.0), q=params.get("q"),
        )
        rec = norm_record(f, spec, rc.grid)
    except SpaceError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NormError, DivergenceError) as exc:
        print(f"norm error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if rc.fmt == "json":
        _emit(json.dumps(rec, indent=2) + "\n", rc.out)
    else:
        _emit(f"{space} {_fmt(rec['value'])} +- {_fmt(rec['error_estimate'])}\n", rc.out)
    return EXIT_OK


def cmd_apply(kind: str, path: str, params: dict, rc: RunConfig) -> int:
    f = _read_function(path)
    n = int(params.get("n", 2))
    try:
        psi = None
        if kind in ("U", "V"):
            psi = WeightFunction.power(params.get("psi_coeff", 1.0), params.get("sigma", 0.0))
        spec = OperatorSpec(kind, n, beta=params.get("beta"), psi=psi)
        out = apply_operator(spec, f, rc.grid)
    except OperatorError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DivergenceError as exc:
        print(f"operator diverges: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(out.to_json(indent=2) + "\n", rc.out)
    return EXIT_OK


def cmd_selfcheck(rc: RunConfig) -> int:
    from .checks import run_checks

    results = run_checks(rc.grid)
    bad = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        bad += not ok
    return EXIT_OK if bad == 0 else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        rc = run_config(args, cfg)
        raw = _raw_params(args, cfg) if args.command != "selfcheck" else {}
        cmd = args.command
        if cmd == "sweep":
            return cmd_sweep(args.theorem, raw, rc)
        params = _single_params(raw)
        if cmd == "constants":
            return cmd_constants(args.theorem, params, rc, args.variant)
        if cmd == "verify":
            return cmd_verify(args.theorem, params, rc)
        if cmd == "extremal":
            return cmd_extremal(args.theorem, params, args.eps, rc)
        if cmd == "norm":
            return cmd_norm(args.space, args.function, params, rc)
        if cmd == "apply":
            return cmd_apply(args.kind, args.function, params, rc)
        return cmd_selfcheck(rc)
    except UsageError as exc:
        print(f"hardylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
