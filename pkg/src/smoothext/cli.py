"""Command-line front end: ``smoothext <command> [options]``.

Exit codes: 0 holds / positive, 1 fails / negative, 2 unknown or heuristic,
3 runtime error, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys

from . import report as rp
from .conditions.classify import (
    NEGATIVE,
    POSITIVE,
    ClassifyParams,
    classify,
    classify_pointset,
)
from .conditions.sequences import FAMILIES, SequenceSpec, custom_sequence
from .conditions.verdict import HOLDS, linear_fit
from .extension.extend import quotient_norm_sandwich
from .extension.omega import IdealSpec, flat_oscillation, omega_decompose
from .extension.testpoly import dn_probe
from .interpolation import PointSet, SampleFunction
from .markov import MarkovQuery, markov_extremal, markov_factor_lagrange
from .numerics import backend as sc
from .numerics.jet import Jet

EXIT_HOLDS, EXIT_FAILS, EXIT_UNKNOWN, EXIT_ERROR, EXIT_USAGE = 0, 1, 2, 3, 64

# the families whose verdicts are known, with their catalog parameters
CATALOG = (
    {"family": "power-log"},
    {"family": "exp-power", "alpha": 0.5},
    {"family": "exp-power", "alpha": 1},
    {"family": "exp-power", "alpha": 2},
    {"family": "inv-log", "alpha": 1},
    {"family": "exp-factorial"},
    {"family": "exp-geometric", "p": 2},
    {"family": "exp-geometric", "p": 3},
    {"family": "almost-accumulation"},
)


class UsageError(Exception):
    pass


class PointSetFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _parse_literal(token: str, line: int):
    try:
        if token.startswith("log:"):
            return sc.ctx.exp(sc.scalar(token[4:]))
        return sc.scalar(token)
    except (ValueError, TypeError, ZeroDivisionError):
        raise PointSetFormatError(line, f"malformed number {token!r}") from None


def parse_pointset_text(text: str) -> PointSet:
    """Nodes one per line: a decimal or ``log:<natural log>``, then an optional multiplicity."""
    nodes, mults = [], []
    prev = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) > 2:
            raise PointSetFormatError(lineno, "expected a node and an optional multiplicity")
        x = _parse_literal(parts[0], lineno)
        mu = 1
        if len(parts) == 2:
            try:
                mu = int(parts[1])
            except ValueError:
                raise PointSetFormatError(lineno, f"malformed multiplicity {parts[1]!r}") from None
            if mu < 1:
                raise PointSetFormatError(lineno, "multiplicity must be >= 1")
        if prev is not None:
            if x == prev:
                raise PointSetFormatError(lineno, "duplicate node")
            if x < prev:
                raise PointSetFormatError(lineno, "nodes must be strictly increasing")
        nodes.append(x)
        mults.append(mu)
        prev = x
    if not nodes:
        raise PointSetFormatError(0, "no nodes")
    return PointSet(tuple(nodes), tuple(mults))


def parse_pointset(path: str) -> PointSet:
    with open(path, encoding="utf-8") as fh:
        return parse_pointset_text(fh.read())


def _digest(path: str) -> dict:
    with open(path, "rb") as fh:
        data = fh.read()
    return {"file": path, "sha256": hashlib.sha256(data).hexdigest()}


def read_numbers(path: str) -> list:
    """One number per line (``log:`` prefix allowed), ``#`` comments."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                out.append(_parse_literal(line, lineno))
    return out


# argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _sequence_args(p):
    p.add_argument("--family", choices=[f for f in FAMILIES if f != "custom"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--length", type=int, help="truncation length L")
    p.add_argument("--logs", help="file of log a_l values, one per line (custom sequence)")


def _grid_args(p):
    p.add_argument("--eps-min-exp", type=int, default=2)
    p.add_argument("--eps-max-exp", type=int, default=40)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=sc.DEFAULT_PRECISION)
    common.add_argument("--out", default="-", help="report path (default stdout)")
    common.add_argument("--plot-data", help="directory for CSV plot data")
    common.add_argument("--workers", type=int, default=1)
    parser = _Parser(prog="smoothext", description="Numerical criteria for the smooth extension property.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    a = sub.add_parser("analyze", parents=[common], help="run every check on a sequence or a point set")
    _sequence_args(a)
    a.add_argument("--points", help="point-set file (geometric checks only)")
    _grid_args(a)
    a.add_argument("--n", type=int, default=0)
    a.add_argument("--r", type=int, default=2)
    a.add_argument("--gamma", type=int, default=2)
    a.add_argument("--k-max", type=int, default=12)
    a.add_argument("--r-max", type=int, default=200)

    m = sub.add_parser("markov", parents=[common], help="local Markov factor on a point set")
    m.add_argument("--points", required=True)
    m.add_argument("--degree", type=int, required=True)
    m.add_argument("--deriv", type=int, required=True)
    m.add_argument("--at", required=True)
    m.add_argument("--method", choices=("lp", "lagrange"), default="lp")

    d = sub.add_parser("decompose", parents=[common], help="ideal decomposition f = (f - g) + g over an eps grid")
    d.add_argument("--points", required=True, help="zero set with multiplicities")
    d.add_argument("--function", choices=("zero", "flat-oscillation", "sin-pi"), default="flat-oscillation")
    d.add_argument("--n", type=int, default=1)
    d.add_argument("--k", type=int, default=3)
    d.add_argument("--eps-min-exp", type=int, default=3)
    d.add_argument("--eps-max-exp", type=int, default=8)
    d.add_argument("--per-patch", type=int, default=64)

    e = sub.add_parser("extend", parents=[common], help="extension of sampled data and quotient-norm bounds")
    e.add_argument("--points", required=True)
    e.add_argument("--values", help="file of f values aligned with the nodes")
    e.add_argument("--constant", help="use f = constant instead of --values")
    e.add_argument("--n", type=int, default=1)
    e.add_argument("--eps", help="lattice parameter (default: half the smallest gap)")
    e.add_argument("--r", type=int, default=1)
    e.add_argument("--per-patch", type=int, default=64)

    q = sub.add_parser("probe-dn", parents=[common], help="test-polynomial probe of the dominating-norm condition")
    _sequence_args(q)
    q.add_argument("--n", type=int, default=0)
    q.add_argument("--s", type=int, default=1)
    q.add_argument("--r", type=int, default=1)
    q.add_argument("--k", type=int, default=1)
    q.add_argument("--d-min", type=int, default=1)
    q.add_argument("--d-max", type=int, default=20)

    c = sub.add_parser("catalog", parents=[common], help="classify the built-in families")
    _grid_args(c)
    c.add_argument("--only", action="append", help="restrict to a family (repeatable)")
    c.add_argument("--length", type=int)
    c.add_argument("--k-max", type=int, default=12)
    return parser


def _sequence_from(args) -> SequenceSpec:
    if args.logs:
        return custom_sequence(read_numbers(args.logs), logs=True)
    if not args.family:
        raise UsageError("one of --family or --logs is required")
    return SequenceSpec(args.family, alpha=args.alpha, beta=args.beta, p=args.p, length=args.length)


def _sequence_echo(seq: SequenceSpec, args) -> dict:
    if getattr(args, "logs", None):
        return {"custom": _digest(args.logs), "length": seq.L}
    out = {"family": seq.family}
    for key in ("alpha", "beta", "p"):
        v = getattr(seq, key)
        if v is not None:
            out[key] = v
    out["length"] = seq.L
    return out


def _classification_body(res) -> dict:
    return {
        "label": res.label,
        "params": res.params.as_dict(),
        "overall": res.overall,
        "consistent_with_paper": res.consistent_with_paper,
        "reasons": list(res.reasons),
        "verdicts": [rp.verdict_dict(v) for v in res.verdicts()],
    }


def _tag(x) -> str:
    return x if isinstance(x, str) else sc.ctx.nstr(sc.scalar(x), 8)


def _series_of(verdicts) -> list:
    out = []
    for v in verdicts:
        if v.series:
            tag = " ".join(f"{k}={_tag(x)}" for k, x in v.params.items() if not isinstance(x, (list, tuple, dict)))
            out.append((f"{v.check} {tag}".strip(), v.series))
    return out


def _exit_for(overall: str) -> int:
    return {POSITIVE: EXIT_HOLDS, NEGATIVE: EXIT_FAILS}.get(overall, EXIT_UNKNOWN)


# commands ---------------------------------------------------------------------


def cmd_analyze(args):
    params = ClassifyParams(
        n=args.n,
        r=args.r,
        gamma=args.gamma,
        k_max=args.k_max,
        r_max=args.r_max,
        eps_min_exp=args.eps_min_exp,
        eps_max_exp=args.eps_max_exp,
        workers=args.workers,
    )
    if args.points:
        K = parse_pointset(args.points)
        res = classify_pointset(K, params, label=args.points)
        inputs = {"points": _digest(args.points)}
    else:
        seq = _sequence_from(args)
        res = classify(seq, params)
        inputs = _sequence_echo(seq, args)
    body = _classification_body(res)
    return rp.build_report("analyze", inputs, body), _series_of(res.verdicts()), _exit_for(res.overall)


def cmd_markov(args):
    K = parse_pointset(args.points)
    y = _parse_literal(args.at, 0)
    if args.method == "lagrange":
        if len(K) != args.degree + 1:
            raise ValueError("the Lagrange method needs exactly degree + 1 nodes")
        value = markov_factor_lagrange(K, y, args.deriv)
        body = {"value": value, "method": "lagrange"}
    else:
        res = markov_extremal(MarkovQuery(K, y, args.degree, args.deriv))
        body = {
            "value": res.value,
            "method": "lp",
            "active": list(res.active),
            "certificate_error": res.certificate_error,
            "chebyshev_coeffs": list(res.chebyshev_coeffs),
            "interval": list(res.interval),
        }
    inputs = {"points": _digest(args.points), "degree": args.degree, "deriv": args.deriv, "at": args.at}
    return rp.build_report("markov", inputs, body), [], EXIT_HOLDS


def _named_function(name: str):
    if name == "zero":
        return lambda x, order: Jet.zero(x, order)
    if name == "flat-oscillation":
        return flat_oscillation

    def sin_pi(x, order):
        return (Jet.variable(x, order) * sc.ctx.pi).sin()

    return sin_pi


def cmd_decompose(args):
    K = parse_pointset(args.points)
    f = _named_function(args.function)
    ideal = IdealSpec(K)
    rows, diff_series, g_series = [], [], []
    for e in range(args.eps_min_exp, args.eps_max_exp + 1):
        eps = sc.ctx.ldexp(1, -e)
        res = omega_decompose(f, ideal, args.n, args.k, eps, per_patch=args.per_patch)
        rows.append({"eps_exp": e, "diff_norm": res.diff_norm.value, "g_norm": res.g_norm.value, "zeroed": res.zeroed})
        diff_series.append((sc.ctx.log(eps), sc.ctx.log(res.diff_norm.value) if res.diff_norm.value else None))
        g_series.append((-sc.ctx.log(eps), sc.ctx.log(res.g_norm.value) if res.g_norm.value else None))
    slopes = {}
    status = HOLDS
    diff_pts = [p for p in diff_series if p[1] is not None]
    g_pts = [p for p in g_series if p[1] is not None]
    fd = linear_fit(*zip(*diff_pts)) if len(diff_pts) >= 2 else None
    fg = linear_fit(*zip(*g_pts)) if len(g_pts) >= 2 else None
    if fd is not None:
        slopes["diff_vs_log_eps"] = fd.slope
        if fd.slope < sc.ctx.mpf("0.7"):
            status = "fails"
    if fg is not None:
        slopes["g_vs_log_inv_eps"] = fg.slope
        if fg.slope > args.k + sc.ctx.mpf("0.3"):
            status = "fails"
    body = {"n": args.n, "k": args.k, "rows": rows, "slopes": slopes, "status": status}
    inputs = {"points": _digest(args.points), "function": args.function}
    series = [("decompose diff_norm", diff_pts), ("decompose g_norm", g_pts)]
    return rp.build_report("decompose", inputs, body), series, EXIT_HOLDS if status == HOLDS else EXIT_FAILS


def cmd_extend(args):
    K = parse_pointset(args.points)
    if any(m != 1 for m in K.multiplicities):
        raise ValueError("extend takes values only: multiplicities must be 1")
    if args.constant is not None:
        values = [_parse_literal(args.constant, 0)] * len(K)
    elif args.values:
        values = read_numbers(args.values)
    else:
        raise UsageError("one of --values or --constant is required")
    if len(values) != len(K):
        raise ValueError(f"{len(values)} values for {len(K)} nodes")
    f = SampleFunction(K, tuple(values))
    eps = _parse_literal(args.eps, 0) if args.eps else None
    sw = quotient_norm_sandwich(f, args.n, eps, args.r, per_patch=args.per_patch)
    ext = sw.extension
    body = {
        "n": args.n,
        "lower": sw.lower,
        "upper": sw.upper,
        "ordered": sw.ordered,
        "seminorm_exhaustive": sw.exhaustive,
        "step": ext.step,
        "patches": ext.interpolated,
        "level_sups": list(ext.norms.level_sups),
        "grid_points": ext.norms.points,
    }
    inputs = {"points": _digest(args.points)}
    if args.values:
        inputs["values"] = _digest(args.values)
    else:
        inputs["constant"] = args.constant
    code = EXIT_HOLDS if sw.ordered else EXIT_FAILS
    if not sw.exhaustive and code == EXIT_HOLDS:
        code = EXIT_UNKNOWN
    return rp.build_report("extend", inputs, body), [], code


def cmd_probe_dn(args):
    seq = _sequence_from(args)
    res = dn_probe(seq, args.n, args.s, args.r, args.k, range(args.d_min, args.d_max + 1))
    body = {
        "params": res.params,
        "slope": res.slope,
        "bounded": res.bounded,
        "geometric_coefficient": res.geometric_coefficient,
        "geometric_residual": res.geometric_residual,
        "max_cross_error": res.max_cross_error,
        "points": [
            {"d": p.d, "log_q": p.log_q, "log_rho_bound": p.log_rho_bound, "log_rho_direct": p.log_rho_direct}
            for p in res.points
        ],
    }
    series = [("probe-dn log_rho_bound", res.trajectory())]
    return rp.build_report("probe-dn", _sequence_echo(seq, args), body), series, EXIT_HOLDS if res.bounded else EXIT_FAILS


def cmd_catalog(args):
    params = ClassifyParams(
        k_max=args.k_max, eps_min_exp=args.eps_min_exp, eps_max_exp=args.eps_max_exp, workers=args.workers
    )
    entries, series, codes = [], [], []
    for item in CATALOG:
        if args.only and item["family"] not in args.only:
            continue
        seq = SequenceSpec(length=args.length, **item)
        res = classify(seq, params)
        entries.append(_classification_body(res))
        series.extend(_series_of(res.verdicts()))
        codes.append({"yes": EXIT_HOLDS, "no": EXIT_FAILS}.get(res.consistent_with_paper, EXIT_UNKNOWN))
    inputs = {"only": sorted(args.only) if args.only else None, "length": args.length}
    if EXIT_FAILS in codes:
        worst = EXIT_FAILS
    else:
        worst = EXIT_UNKNOWN if EXIT_UNKNOWN in codes else EXIT_HOLDS
    return rp.build_report("catalog", inputs, {"entries": entries}), series, worst


COMMANDS = {
    "analyze": cmd_analyze,
    "markov": cmd_markov,
    "decompose": cmd_decompose,
    "extend": cmd_extend,
    "probe-dn": cmd_probe_dn,
    "catalog": cmd_catalog,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        sc.set_precision(args.precision_bits)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ValueError as exc:
        sys.stderr.write(f"smoothext: {exc}\n")
        return EXIT_USAGE
    try:
        report, series, code = COMMANDS[args.command](args)
        rp.write_report(report, args.out)
        if args.plot_data:
            rp.write_plot_data(args.plot_data, series)
    except UsageError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except (ValueError, OSError, ArithmeticError) as exc:
        sys.stderr.write(f"smoothext: error: {exc}\n")
        return EXIT_ERROR
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
