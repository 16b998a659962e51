"""``gamma-schur`` command-line front end.

Exit codes: 0 success, 1 domain error (JSON record on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import dist, verify
from .crossings import crossing_points
from .dist import WeightVector
from .errors import GammaSchurError
from .planners import signal, spectrum, trace
from .schur import analytic_verdict, compare_numeric

SCHEMA = "gamma-schur/1"


def fmt(v) -> str:
    return "none" if v is None else f"{float(v):#.12g}"


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _weights(args, name: str) -> WeightVector:
    inline, path = getattr(args, name), getattr(args, f"{name}_file")
    if path is not None:
        return spectrum.ingest_spectrum(path, kind="list").eigenvalues
    return WeightVector(inline)


def _emit(args, record: dict, text: str):
    if args.json:
        print(json.dumps({"schema": SCHEMA, **record}))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _convolution(args):
    return dist.iid_convolution(_weights(args, "weights"), args.alpha, args.beta, args.eval_tol)


def cmd_cdf(args):
    conv = _convolution(args)
    for x in args.x:
        v = float(dist.cdf(conv, x))
        _emit(args, {"kind": "cdf", "x": x, "value": v, "error_bound": dist.error_bound(conv)},
              fmt(v))


def cmd_pdf(args):
    conv = _convolution(args)
    for x in args.x:
        v = float(dist.pdf(conv, x))
        _emit(args, {"kind": "pdf", "x": x, "value": v, "error_bound": dist.error_bound(conv)},
              fmt(v))


def cmd_mode(args):
    conv = _convolution(args)
    tol = dist.default_mode_tol(conv) if args.mode_tol is None else args.mode_tol
    v = dist.mode(conv, tol)
    _emit(args, {"kind": "mode", "value": v, "mode_tol": tol}, fmt(v))


def cmd_compare(args):
    mu, lam = _weights(args, "mu"), _weights(args, "lambda")
    for x in args.x:
        if args.numeric:
            verdict = compare_numeric(mu, lam, args.alpha, args.beta, x, args.eval_tol)
        else:
            verdict = analytic_verdict(mu, lam, args.alpha, args.beta, x)
        text = (f"{verdict.relation.value} {verdict.decided_by.value} "
                f"concave={fmt(verdict.concave_threshold)} convex={fmt(verdict.convex_threshold)}")
        if verdict.numeric_gap is not None:
            text += f" gap={fmt(verdict.numeric_gap)} err={fmt(verdict.gap_error)}"
        _emit(args, {"kind": "OrderVerdict", "x": x, **verdict.to_dict()}, text)


def cmd_crossings(args):
    mu, lam = _weights(args, "mu"), _weights(args, "lambda")
    report, sc = crossing_points(mu, lam, args.alpha, args.beta, args.x_lo, args.x_hi,
                                 args.grid, args.refine_tol, args.eval_tol,
                                 threads=args.threads, return_scan=True)
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["x", "P_mu", "P_lambda", "D"])
        for row in zip(sc.x, sc.p_mu, sc.p_lambda, sc.d):
            w.writerow([fmt(v) for v in row])
        return
    lines = [f"crossings {report.count} on [{fmt(report.scan_range[0])}, {fmt(report.scan_range[1])}]"]
    lines += [f"x={fmt(x)} width={fmt(w)}" for x, w in report.crossings]
    lines.append(f"min_gap_detected={fmt(report.min_gap_detected)}")
    _emit(args, {"kind": "CrossingReport", **report.to_dict()}, "\n".join(lines))


def cmd_plan_signal(args):
    plan = signal.signal_min_samples(args.x, args.delta)
    _emit(args, {"kind": "SignalPlan", **plan.to_dict()},
          f"N={plan.min_samples} type1={fmt(plan.type1_at_min)} monotone={plan.monotone_region}")


def cmd_plan_trace(args):
    if args.spectrum_file is not None:
        spectr = spectrum.ingest_spectrum(args.spectrum_file, kind=args.kind).eigenvalues
    else:
        spectr = spectrum.spectrum_from_eigenvalues(args.spectrum).eigenvalues
    plan = trace.trace_exact_min_samples(spectr, args.epsilon, args.delta,
                                         eval_tolerance=args.eval_tol)
    _emit(args, {"kind": "TracePlan", **plan.to_dict()},
          f"exact={plan.exact_samples} bound={plan.bound_samples} "
          f"effective_rank={fmt(plan.effective_rank)}")


def cmd_verify(args):
    checks = verify.run_suite(args.suite, args.seed, workers=args.threads)
    for c in checks:
        _emit(args, {"kind": "Check", **c.to_dict()},
              f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    return 0 if all(c.passed for c in checks) else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags with suppressed defaults so a flag
    # given before the subcommand is not overwritten
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--json", action="store_true", default=d(False),
                   help="one JSON object per result")
    g.add_argument("--seed", type=int, default=d(None),
                   help="seed for randomized suites (default: each suite's fixed seed)")
    g.add_argument("--threads", type=_positive_int, default=d(os.cpu_count() or 1),
                   help="worker threads for grid and sampling work (default: CPU count)")
    g.add_argument("--eval-tol", type=float, default=d(dist.DEFAULT_EVAL_TOL),
                   help=f"certified absolute error of cdf/pdf (default {dist.DEFAULT_EVAL_TOL:g})")
    g.add_argument("--mode-tol", type=float, default=d(None),
                   help=f"mode location tolerance (default {dist.MODE_TOL_FACTOR:g} * mean)")
    g.add_argument("--refine-tol", type=float, default=d(None),
                   help="crossing bracket width (default 1e-8 * sum of lambda)")
    return p


def _add_weights(p, name: str, flag: str):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument(f"--{flag}", dest=name, type=_float_list, help="comma-separated weights")
    g.add_argument(f"--{flag}-file", dest=f"{name}_file",
                   help="file of weights separated by commas or newlines")


def _add_gamma(p, need_x: bool = True):
    p.add_argument("--alpha", type=float, required=True, help="common shape")
    p.add_argument("--beta", type=float, required=True, help="common rate")
    if need_x:
        p.add_argument("--x", type=_float_list, required=True, help="evaluation point(s)")


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(
        prog="gamma-schur", parents=[_common(suppress=False)],
        description="Distribution functions, modes and Schur-order comparisons "
                    "of weighted sums of i.i.d. gamma variables.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    for name, fn, helptext in (("cdf", cmd_cdf, "Pr(sum < x)"),
                               ("pdf", cmd_pdf, "density at x")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        _add_weights(p, "weights", "weights")
        _add_gamma(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("mode", parents=[common], help="mode of the density")
    _add_weights(p, "weights", "weights")
    _add_gamma(p, need_x=False)
    p.set_defaults(func=cmd_mode)

    p = sub.add_parser("compare", parents=[common], help="order P(mu; x) against P(lambda; x)")
    _add_weights(p, "mu", "mu")
    _add_weights(p, "lambda", "lambda")
    _add_gamma(p)
    p.add_argument("--numeric", action="store_true",
                   help="decide from certified cdf values instead of analytic thresholds")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("crossings", parents=[common], help="sign changes of P(mu) - P(lambda)")
    _add_weights(p, "mu", "mu")
    _add_weights(p, "lambda", "lambda")
    _add_gamma(p, need_x=False)
    p.add_argument("--x-lo", type=float, default=None, help="scan start (default from thresholds)")
    p.add_argument("--x-hi", type=float, default=None, help="scan end (default from thresholds)")
    p.add_argument("--grid", type=int, default=512, help="grid points (default 512)")
    p.add_argument("--csv", action="store_true", help="emit the scan as CSV: x,P_mu,P_lambda,D")
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("plan-signal", parents=[common], help="Type-I sample size for a threshold")
    p.add_argument("--x", type=float, required=True, help="detection threshold")
    p.add_argument("--delta", type=float, required=True, help="Type-I tolerance")
    p.set_defaults(func=cmd_plan_signal)

    p = sub.add_parser("plan-trace", parents=[common], help="trace-estimator sample size")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--spectrum", type=_float_list, help="comma-separated eigenvalues")
    g.add_argument("--spectrum-file", help="eigenvalue list or dense symmetric matrix file")
    p.add_argument("--kind", choices=("auto", "list", "matrix"), default="auto",
                   help="spectrum file format (default auto)")
    p.add_argument("--epsilon", type=float, required=True, help="relative accuracy")
    p.add_argument("--delta", type=float, required=True, help="failure probability")
    p.set_defaults(func=cmd_plan_trace)

    p = sub.add_parser("verify", parents=[common], help="run numerical property suites")
    p.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except (GammaSchurError, ValueError, ArithmeticError, OSError) as exc:
        sys.stdout.flush()
        err = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
