"""``qprab``: evaluate, apply, verify and solve from the command line.

Exit codes: 0 success, 1 domain or usage error, 2 non-convergence or a
failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from contextlib import contextmanager

import numpy as np

from . import __version__, verify
from .errors import DomainError, NotConverged, QCalcError
from .qcalc import QFunction
from .qcore import QContext, SeriesValue, q_gamma, q_power_frac
from .qfrac import (
    OperatorKind,
    FracOperatorSpec,
    prabhakar_derivative_fn,
    prabhakar_integral_fn,
)
from .qsolve import (
    CauchyProblem,
    SolverConfig,
    contraction_constant,
    differential_residual,
    initial_condition_value,
    solve,
    volterra_residual,
)
from .qspecial import (
    GeneralizedArgs,
    PrabhakarParams,
    kernel_g,
    q_mittag_leffler,
    q_prabhakar,
    q_prabhakar_generalized,
)

EXIT_OK, EXIT_DOMAIN, EXIT_FAIL = 0, 1, 2
COLUMNS = ("x", "value", "terms_used", "tail_estimate", "converged")
FUNCTIONS = ("q_gamma", "q_mittag_leffler", "q_prabhakar", "q_prabhakar_generalized", "kernel_g")
OPERATORS = ("rl_integral", "rl_derivative", "prabhakar_integral", "prabhakar_derivative", "pd_of_pi")
TEST_FUNCTIONS = ("monomial", "constant", "kernel")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


def _points(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad point list {text!r}") from exc


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("precision and output")
    g.add_argument("--q", type=float, default=0.5)
    g.add_argument("--eps-series", type=float, default=1e-14)
    g.add_argument("--eps-prod", type=float, default=1e-16)
    g.add_argument("--max-terms", type=int, default=10_000)
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out", default="-", help="output path, '-' for standard output")
    g.add_argument("--seed", type=int, default=0)
    return p


def _params(p: argparse.ArgumentParser, beta=0.6) -> None:
    g = p.add_argument_group("parameters")
    g.add_argument("--alpha", type=float, default=0.9)
    g.add_argument("--beta", type=float, default=beta)
    g.add_argument("--gamma", type=float, default=0.4)
    g.add_argument("--omega", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qprab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qprab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, helptext in (("eval", "evaluate a special function"), ("table", "tabulate a special function on a grid")):
        p = sub.add_parser(name, parents=[_common()], help=helptext)
        p.add_argument("--function", choices=FUNCTIONS, required=True)
        _params(p)
        p.add_argument("--delta", type=float, default=None, help="q-power exponent (default alpha)")
        p.add_argument("--s", type=float, default=0.0, help="shift s of the generalized argument")
        p.add_argument("--mu", type=float, default=0.6)
        p.add_argument("--sigma", type=float, default=0.4)
        if name == "eval":
            p.add_argument("--points", type=_points, required=True)
        else:
            p.add_argument("--start", type=float, required=True)
            p.add_argument("--stop", type=float, required=True)
            p.add_argument("--num", type=int, default=11)

    p = sub.add_parser("apply", parents=[_common()], help="apply a fractional operator to a test function")
    p.add_argument("--operator", choices=OPERATORS, required=True)
    _params(p)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--test-function", choices=TEST_FUNCTIONS, default="monomial")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="monomial exponent")
    p.add_argument("--c", type=float, default=1.0, help="constant value")
    p.add_argument("--mu", type=float, default=0.6)
    p.add_argument("--sigma", type=float, default=0.4)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--shift", type=int, default=1, help="pd_of_pi inner omega is q^(shift*gamma) omega")
    p.add_argument("--points", type=_points, required=True)

    p = sub.add_parser("verify", parents=[_common()], help="run identity suites")
    p.add_argument("--suite", choices=(*verify.SUITES, "all"), default="all")
    p.add_argument("--pairing", choices=tuple(verify.PAIRINGS), default="published")
    p.set_defaults(format="json")

    p = sub.add_parser("solve", parents=[_common()], help="solve the Cauchy-type problem by Picard iteration")
    _params(p)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--h", type=float, default=None, help="working endpoint (default b)")
    p.add_argument("--xi0", type=float, default=1.0)
    p.add_argument("--rhs", choices=("zero", "constant", "linear"), default="linear")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=0.3)
    p.add_argument("--lipschitz", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--lattice-depth", type=int, default=64)
    p.add_argument("--kernel-shift", type=int, default=1)
    p.add_argument("--force", action="store_true", help="solve even if delta1 >= 1")
    p.set_defaults(format="json")
    return parser


# -- output ----------------------------------------------------------------------


def _num(v: float) -> str:
    return format(float(v), ".17g")


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    return v


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for x, sv in rows:
        w.writerow([_num(x), _num(sv.value), sv.terms_used, _num(sv.tail_estimate), str(sv.converged).lower()])
    return buf.getvalue()


def _row_dict(x, sv: SeriesValue) -> dict:
    return {
        "x": x,
        "value": sv.value,
        "terms_used": sv.terms_used,
        "tail_estimate": sv.tail_estimate,
        "converged": sv.converged,
    }


def _report(args, results, passed: bool) -> str:
    echo = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    doc = {
        "meta": {"program": "qprab", "version": __version__, "command": args.command},
        "config_echo": echo,
        "results": results,
        "pass": passed,
    }
    return json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n"


def _emit(args, text: str) -> None:
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _context(args) -> QContext:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return QContext(args.q, args.eps_series, args.eps_prod, args.max_terms)


@contextmanager
def _partial_on_failure(rows, x):
    try:
        yield
    except NotConverged as exc:
        sv = exc.partial or SeriesValue(math.nan, 0, math.inf, False)
        rows.append((x, SeriesValue(sv.value, sv.terms_used, sv.tail_estimate, False)))


def _write_rows(args, rows) -> int:
    passed = all(sv.converged for _, sv in rows)
    if args.format == "csv":
        _emit(args, _rows_csv(rows))
    else:
        _emit(args, _report(args, [_row_dict(x, sv) for x, sv in rows], passed))
    return EXIT_OK if passed else EXIT_FAIL


# -- commands --------------------------------------------------------------------


def _special(ctx: QContext, args, x: float) -> SeriesValue:
    fn = args.function
    if fn == "q_gamma":
        return q_gamma(ctx, x)
    if fn == "q_mittag_leffler":
        return q_mittag_leffler(ctx, args.alpha, args.beta, x)
    if fn == "q_prabhakar":
        return q_prabhakar(ctx, args.alpha, args.beta, args.gamma, x)
    if fn == "q_prabhakar_generalized":
        delta = args.alpha if args.delta is None else args.delta
        p = PrabhakarParams(args.alpha, args.beta, args.gamma)
        return q_prabhakar_generalized(ctx, p, args.omega, GeneralizedArgs(delta, x, args.s))
    return kernel_g(ctx, args.alpha, args.mu, args.sigma, args.omega, x, args.s)


def cmd_eval(args, points=None) -> int:
    ctx = _context(args)
    rows = []
    for x in points if points is not None else args.points:
        with _partial_on_failure(rows, x):
            rows.append((x, _special(ctx, args, x)))
    return _write_rows(args, rows)


def cmd_table(args) -> int:
    if args.num < 1:
        raise UsageError("--num must be positive")
    return cmd_eval(args, [float(v) for v in np.linspace(args.start, args.stop, args.num)])


def _test_function(ctx: QContext, args) -> QFunction:
    a = args.a
    if args.test_function == "constant":
        return QFunction.constant(args.c)
    if args.test_function == "monomial":
        return QFunction(lambda t: q_power_frac(ctx, t, a, args.lam).value, name="(t-a)^lambda")
    wp = ctx.q**args.gamma * args.omega
    return QFunction(
        lambda t: kernel_g(ctx, args.alpha, args.mu, args.sigma, wp, t, args.s).value, name="g"
    )


def cmd_apply(args) -> int:
    ctx = _context(args)
    f = _test_function(ctx, args)
    op = args.operator
    rows = []
    if op == "pd_of_pi":
        p = PrabhakarParams(args.alpha, args.beta, args.gamma, args.omega)
        inner_p = p.with_omega(ctx.q ** (args.shift * p.gamma) * p.omega)
        inner = prabhakar_integral_fn(ctx, inner_p, args.a, f)
        d = prabhakar_derivative_fn(ctx, p, args.a, inner)
        for x in args.points:
            with _partial_on_failure(rows, x):
                rows.append((x, SeriesValue(d(x), 0, 0.0, True)))
        return _write_rows(args, rows)
    kind = OperatorKind(op)
    if kind in (OperatorKind.RL_INTEGRAL, OperatorKind.RL_DERIVATIVE):
        spec = FracOperatorSpec(kind, args.alpha, args.a)
    else:
        spec = FracOperatorSpec(kind, PrabhakarParams(args.alpha, args.beta, args.gamma, args.omega), args.a)
    for x in args.points:
        with _partial_on_failure(rows, x):
            rows.append((x, spec.apply(ctx, f, x)))
    return _write_rows(args, rows)


def cmd_verify(args) -> int:
    ctx = _context(args)
    results = verify.run(ctx, args.suite, args.seed, args.pairing)
    passed = all(r.passed for r in results)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("identity", "suite", "max_residual", "tolerance", "cases", "pass", "error"))
        for r in results:
            w.writerow((r.name, r.suite, _num(r.max_residual), _num(r.tolerance), r.cases,
                        str(r.passed).lower(), r.error or ""))
        _emit(args, buf.getvalue())
    else:
        _emit(args, _report(args, [r.as_dict() for r in results], passed))
    if not passed:
        first = next(r for r in results if not r.passed)
        why = first.error or f"residual {first.max_residual:.3g} > {first.tolerance:.1g}"
        print(f"qprab: verification failed: {first.name}: {why}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _rhs(args):
    if args.rhs == "zero":
        return (lambda x, y: 0.0), 0.0
    if args.rhs == "constant":
        c = args.c
        return (lambda x, y: c), 0.0
    lam = args.lam
    return (lambda x, y: lam * y), abs(lam)


def cmd_solve(args) -> int:
    ctx = _context(args)
    rhs, A = _rhs(args)
    if args.lipschitz is not None:
        A = args.lipschitz
    p = PrabhakarParams(args.alpha, args.beta, args.gamma, args.omega)
    prob = CauchyProblem(p, args.a, args.b, args.xi0, rhs, lipschitz_A=A, kernel_shift=args.kernel_shift)
    h = args.b if args.h is None else args.h
    cfg = SolverConfig(h=h, max_iter=args.max_iter, tol=args.tol, lattice_depth=args.lattice_depth)
    delta1 = contraction_constant(ctx, prob, h)
    if delta1 >= 1 and not args.force:
        print(
            f"qprab: contraction condition delta1 < 1 violated (delta1={delta1:.6g}); "
            "choose a smaller h or pass --force",
            file=sys.stderr,
        )
        return EXIT_FAIL
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = solve(ctx, prob, cfg)
    y = rep.solution
    shown = min(cfg.lattice_depth, y.nodes.size)
    checks = {
        "volterra_residual": volterra_residual(ctx, prob, y, depth=shown),
        "initial_condition_value": initial_condition_value(ctx, prob, y),
        "differential_residual": differential_residual(ctx, prob, y),
    }
    checks["initial_condition_residual"] = abs(checks["initial_condition_value"] - args.xi0)
    passed = (
        rep.converged
        and checks["volterra_residual"] <= 10 * cfg.tol
        and checks["initial_condition_residual"] <= 1e-5
        and checks["differential_residual"] <= 1e-4
    )
    last = rep.residual_history[-1] if rep.residual_history else 0.0
    rows = [(float(x), SeriesValue(float(v), rep.iterations, last, rep.converged))
            for x, v in zip(y.nodes[:shown], y.table[:shown])]
    if args.format == "csv":
        _emit(args, _rows_csv(rows))
    else:
        body = {"solver": rep.summary(), "checks": checks,
                "solution": [_row_dict(x, sv) for x, sv in rows]}
        _emit(args, _report(args, [body], passed))
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "table": cmd_table, "apply": cmd_apply, "verify": cmd_verify, "solve": cmd_solve}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (DomainError, UsageError) as exc:
        print(f"qprab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except NotConverged as exc:
        print(f"qprab: not converged: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except QCalcError as exc:
        print(f"qprab: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
