"""``companion-quad``: command-line front end.

Every command prints one JSON report on stdout (or a CSV table for the
table-shaped commands ``sharpness`` and ``convergence``); diagnostics go to
stderr. Exit codes: 0 success, 1 inequality violation, 2 usage error,
3 input domain error, 4 internal soundness failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import __version__
from .bounds import best_bound
from .errors import (
    BoundInputError,
    DensityError,
    EvaluationDomainError,
    ExpressionSyntaxError,
    IntegrationError,
    IntervalError,
)
from .kernel import IntervalCtx
from .oracle.integrands import ExpressionIntegrand, ExtremalWitness
from .oracle.integrate import default_rel_tol, integrate
from .oracle.sharpness import predicted_ratio, sharpness_row
from .oracle.stats import estimate_stats
from .probability import DensityCtx, all_prob_bounds
from .quadrature import Partition, adaptive_partition, certify, convergence_csv, convergence_study
from .report import dumps, make_report
from .verification import BOUND_TOL, verify

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_VIOLATION", "EXIT_USAGE", "EXIT_DOMAIN", "EXIT_UNSOUND"]

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_UNSOUND = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _real_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="companion-quad", description="Companion two-point rule: bounds, quadrature, checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output_flags(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--json", action="store_true", help="JSON report (default)")
        group.add_argument("--csv", action="store_true", help="CSV table (table-shaped commands only)")

    def interval(p, fname="--f", fhelp="integrand expression in t"):
        p.add_argument(fname, required=True, help=fhelp)
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("bounds", help="lhs and every pointwise bound at x")
    interval(p)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--p", type=float, default=2.0, help="exponent of the Lp baseline (default 2)")
    output_flags(p)

    p = sub.add_parser("integrate", help="composite rule with certified remainder bounds")
    interval(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--n", type=int, help="uniform partition with n cells")
    mode.add_argument("--nonuniform", type=_real_list, help="comma-separated interior points")
    mode.add_argument("--target", type=float, help="adaptive refinement to this certified bound")
    p.add_argument("--reference", action="store_true", help="attach the oracle's true error")
    output_flags(p)

    p = sub.add_parser("verify", help="run the corpus soundness check")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--parallel", type=int, default=1)
    output_flags(p)

    p = sub.add_parser("sharpness", help="extremal family showing the 1/4 constant is sharp")
    p.add_argument("--eps", type=_real_list, required=True, help="comma-separated epsilons")
    p.add_argument("--x", type=float, default=0.25)
    output_flags(p)

    p = sub.add_parser("prob", help="density bounds: CDF average versus expectation")
    interval(p, "--pdf", "density expression in t")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--gamma", type=float, help="lower bound of the density (estimated if omitted)")
    p.add_argument("--Gamma", type=float, help="upper bound of the density (estimated if omitted)")
    output_flags(p)

    p = sub.add_parser("convergence", help="error and bounds over a list of uniform n")
    interval(p)
    p.add_argument("--n-list", type=_int_list, default=[1, 2, 4, 8, 16, 32, 64])
    output_flags(p)
    return parser


# ---------------------------------------------------------------------------
# commands return (report-or-csv-text, exit code)


def _no_csv(args):
    if args.csv:
        raise UsageError("--csv is only available for table-shaped commands (sharpness, convergence)")


def cmd_bounds(args):
    _no_csv(args)
    ctx = IntervalCtx(args.a, args.b, args.x)
    f = ExpressionIntegrand(args.f)
    stats = estimate_stats(f, ctx.a, ctx.b, p=args.p)
    mean, _ = integrate(f, ctx.a, ctx.b)
    report = best_bound(f, ctx, stats, mean)
    results = {
        **report.as_dict(),
        "rhs": {e.bound_id: e.rhs for e in report.entries},
        "stats": stats.as_dict(),
    }
    code = EXIT_VIOLATION if report.violations(BOUND_TOL) else EXIT_OK
    inputs = {"f": args.f, "a": args.a, "b": args.b, "x": args.x, "p": args.p}
    return make_report("bounds", inputs, results, []), code


def cmd_integrate(args):
    _no_csv(args)
    f = ExpressionIntegrand(args.f)
    if not args.a < args.b:
        raise IntervalError(f"need a < b, got [{args.a}, {args.b}]")
    warnings = []
    if args.target is not None:
        P, res = adaptive_partition(f, args.a, args.b, args.target, reference=args.reference)
        mode = "adaptive"
    else:
        P = Partition.uniform(args.a, args.b, args.n) if args.n is not None else Partition.from_interior(
            args.a, args.b, args.nonuniform
        )
        mode = "uniform" if args.n is not None else "nonuniform"
        stats = estimate_stats(f, args.a, args.b)
        reference = integrate(f, args.a, args.b)[0] if args.reference else None
        res = certify(f, P, stats, reference)
        warnings.extend(res.notes)
    results = {**res.as_dict(), "mode": mode, "points": list(P.points)}
    code = EXIT_OK
    if res.true_error is not None:
        err = abs(res.true_error)
        broken = [k for k, v in res.populated_bounds().items() if err > v + BOUND_TOL * (1 + abs(v))]
        if broken:
            print(f"soundness failure: true error exceeds {', '.join(broken)}", file=sys.stderr)
            code = EXIT_UNSOUND
    inputs = {
        "f": args.f,
        "a": args.a,
        "b": args.b,
        "n": args.n,
        "nonuniform": args.nonuniform,
        "target": args.target,
        "reference": args.reference,
    }
    return make_report("integrate", inputs, results, warnings), code


def cmd_verify(args):
    _no_csv(args)
    if args.trials < 1 or args.parallel < 1:
        raise UsageError("--trials and --parallel must be >= 1")
    rep = verify(args.seed, args.trials, args.parallel)
    code = EXIT_OK
    if rep.violations:
        code = EXIT_VIOLATION
        print(f"{len(rep.violations)} violation(s) found", file=sys.stderr)
    elif rep.errors:
        code = EXIT_UNSOUND
        print(f"{len(rep.errors)} trial(s) failed internally", file=sys.stderr)
    inputs = {"seed": args.seed, "trials": args.trials, "parallel": args.parallel}
    return make_report("verify", inputs, {**rep.as_dict(), "tolerance": BOUND_TOL}, []), code


def cmd_sharpness(args):
    if not 0.25 <= args.x <= 0.5:
        raise UsageError(f"--x must lie in [1/4, 1/2], got {args.x}")
    rows = []
    for eps in args.eps:
        ExtremalWitness(eps, args.x)  # validates eps before any work
        row = sharpness_row(eps, args.x)
        rows.append({**row._asdict(), "predicted": predicted_ratio(eps, args.x)})
    if args.csv:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["epsilon", "lhs", "rhs", "ratio", "predicted"])
        for r in rows:
            writer.writerow(["%.17g" % r[k] for k in ("epsilon", "lhs", "rhs", "ratio", "predicted")])
        return buf.getvalue(), EXIT_OK
    return make_report("sharpness", {"eps": args.eps, "x": args.x}, {"rows": rows}, []), EXIT_OK


def cmd_prob(args):
    _no_csv(args)
    ctx = IntervalCtx(args.a, args.b, args.x)
    d = DensityCtx.from_pdf(ExpressionIntegrand(args.pdf), args.a, args.b)
    warnings = []
    if d.normalized:
        warnings.append(f"density rescaled by 1/{d.total_mass!r} to unit mass")
    for name in ("gamma", "Gamma"):
        value = getattr(args, name)
        if value is not None and value < 0:
            warnings.append(f"{name} = {value!r} is negative; a density is non-negative so this only weakens the bound")
    values = all_prob_bounds(d, ctx, gamma=args.gamma, Gamma=args.Gamma)
    results = {**values, "total_mass": d.total_mass, "normalized": d.normalized}
    code = EXIT_OK
    lhs = values["lhs"]
    for name in ("th41g", "th41G", "th42", "th43"):
        rhs = values[name]
        if rhs is not None and lhs > rhs + BOUND_TOL * (1 + abs(rhs)):
            code = EXIT_VIOLATION
    inputs = {"pdf": args.pdf, "a": args.a, "b": args.b, "x": args.x, "gamma": args.gamma, "Gamma": args.Gamma}
    return make_report("prob", inputs, results, warnings), code


def cmd_convergence(args):
    if not args.a < args.b:
        raise IntervalError(f"need a < b, got [{args.a}, {args.b}]")
    f = ExpressionIntegrand(args.f)
    rows = convergence_study(f, args.a, args.b, args.n_list)
    code = EXIT_OK
    for row in rows:
        err = abs(row.true_error)
        for v in (row.bound31g, row.bound31G, row.bound32, row.bound33):
            if v is not None and err > v + BOUND_TOL * (1 + abs(v)):
                code = EXIT_UNSOUND
    if code:
        print("soundness failure: a remainder bound is below the true error", file=sys.stderr)
    if args.csv:
        return convergence_csv(rows), code
    inputs = {"f": args.f, "a": args.a, "b": args.b, "n_list": args.n_list}
    return make_report("convergence", inputs, {"rows": [r.as_dict() for r in rows]}, []), code


COMMANDS = {
    "bounds": cmd_bounds,
    "integrate": cmd_integrate,
    "verify": cmd_verify,
    "sharpness": cmd_sharpness,
    "prob": cmd_prob,
    "convergence": cmd_convergence,
}


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        default_rel_tol()  # reject a malformed environment before any work
        output, code = COMMANDS[args.command](args)
    except (UsageError, ExpressionSyntaxError, IntervalError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EvaluationDomainError, DensityError, BoundInputError, IntegrationError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        # e.g. a malformed tolerance in the environment
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(output, str):
        stdout.write(output)
    else:
        stdout.write(dumps(output) + "\n")
    return code

