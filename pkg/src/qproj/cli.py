"""Command-line front end.

Exit codes: 0 ok, 2 usage or domain error, 3 numerical failure,
4 projection check failed, 5 identity certificate nonzero. Errors are
reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from .awmap import aw_from_params, shifted_equivalence_check
from .connect import (
    SingularSystemError,
    beta_by_recurrence,
    beta_closed_form,
    product_formula_check,
    zero_evaluation_check,
)
from .family import (
    DomainError,
    Params,
    ZeroPivotError,
    eval_monic_p,
    eval_nonmonic_p,
    eval_Q,
)
from .measure import NegativeProduct, gauss_quadrature, jacobi_truncate, quadrature_from_jacobi, support_classify
from .project import projection_sweep
from .qcore import MixedBackendError, parse_rational
from .symcheck import (
    verify_boundary_gammas,
    verify_delta_claim,
    verify_H2_t_cancellation,
    verify_HH0,
    verify_HHs,
    verify_pascal,
    verify_splitting,
)
from .tridiag import EigenConvergenceError

__all__ = ["dumps", "main"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PROJECTION, EXIT_IDENTITY = 0, 2, 3, 4, 5

SUITES = ("hhs", "hh0", "h2t", "gammas", "pascal", "split", "delta", "beta", "all")


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.code, self.kind, self.extra = code, kind, extra


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "UsageError", message)


# deterministic JSON


def _encode(v) -> str:
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return json.dumps(f"{v.numerator}/{v.denominator}")
    if isinstance(v, float):
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        items = sorted((str(k), val) for k, val in v.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(val)}" for k, val in items) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_encode(x) for x in v) + "]"
    raise TypeError(f"cannot encode {type(v).__name__}")


def dumps(obj) -> str:
    """JSON with sorted keys, floats at 17 significant digits, Fractions as ``"num/den"``."""
    return _encode(obj)


def _emit(obj, path=None):
    text = dumps(obj) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write(text: str, path: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# argument handling


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_params(p: argparse.ArgumentParser, default_backend: str = "float"):
    p.add_argument("--eta", type=_rational, required=True)
    p.add_argument("--theta", type=_rational, required=True)
    p.add_argument("--tau", type=_rational, required=True)
    p.add_argument("--q", type=_rational, required=True)
    p.add_argument("--backend", choices=("exact", "float"), default=default_backend)


def _params(args) -> Params:
    vals = (args.eta, args.theta, args.tau, args.q)
    if args.backend == "float":
        vals = tuple(float(v) for v in vals)
    return Params(*vals)


def _scalar(args, value):
    if value is None:
        return None
    return float(value) if args.backend == "float" else value


def _params_dict(p: Params) -> dict:
    return {k: getattr(p, k) for k in ("eta", "theta", "tau", "q")}


def _threads(n: int) -> int:
    return (os.cpu_count() or 1) if n == 0 else n


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qproj", description="q-orthogonal polynomial family toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate a polynomial family at one point")
    _add_params(p)
    p.add_argument("--family", choices=("p-monic", "p", "Q-monic", "Q"), default="p-monic")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--y", type=_rational, required=True)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--x", type=_rational, help="Q families only")
    p.add_argument("--s", type=_rational, help="Q families only")

    p = sub.add_parser("quad", help="Gauss quadrature of mu_t, or of nu_{x,t,s} with --x/--s")
    _add_params(p)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--x", type=_rational)
    p.add_argument("--s", type=_rational)
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")

    p = sub.add_parser("project", help="check the projection formula at the nodes of mu_s")
    _add_params(p, default_backend="exact")
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--N", type=int, default=40)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--x", type=_rational, action="append", help="check these points instead (repeatable)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=0, help="0 = one per CPU, 1 = sequential")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")

    p = sub.add_parser("awmap", help="Askey-Wilson parameters at time t")
    _add_params(p)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--n-max", type=int, default=12)

    p = sub.add_parser("support", help="lower bound, atoms and support indices of mu_t")
    _add_params(p)
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--max-atoms", type=int, default=64)

    p = sub.add_parser("verify", help="certify identities exactly")
    p.add_argument("--suite", default="all", help="one of " + ", ".join(SUITES))
    p.add_argument("--max-n", type=int, default=6)
    return parser


# commands


def cmd_eval(args) -> int:
    P = _params(args)
    y, t = _scalar(args, args.y), _scalar(args, args.t)
    if args.n < 0:
        raise DomainError("n must be >= 0")
    if args.family in ("Q-monic", "Q"):
        if args.x is None or args.s is None:
            raise DomainError("the Q families need --x and --s")
        seq = eval_Q(P, args.n, y, _scalar(args, args.x), t, _scalar(args, args.s), monic=args.family == "Q-monic")
    elif args.family == "p":
        seq = eval_nonmonic_p(P, args.n, y, t)
    else:
        seq = eval_monic_p(P, args.n, y, t)
    _emit({"schema": "qproj.eval/1", "family": args.family, "params": _params_dict(P), "y": y, "t": t, "values": list(seq.values)})
    return EXIT_OK


def cmd_quad(args) -> int:
    P = _params(args)
    t = _scalar(args, args.t)
    if (args.x is None) != (args.s is None):
        raise DomainError("--x and --s go together")
    if args.x is None:
        quad = gauss_quadrature(P, t, args.N)
    else:
        quad = quadrature_from_jacobi(jacobi_truncate(P, t, args.N, aux=(_scalar(args, args.x), _scalar(args, args.s))))
    report = {
        "schema": "qproj.quadrature/1",
        "params": _params_dict(P),
        "measure": quad.origin,
        "t": t,
        "x": _scalar(args, args.x),
        "s": _scalar(args, args.s),
        "N": args.N,
        "nodes": [float(v) for v in quad.nodes],
        "weights": [float(v) for v in quad.weights],
    }
    if args.csv:
        _write(quad.to_csv(), args.csv)
    if args.json or not args.csv:
        _emit(report, args.json)
    return EXIT_OK


def _sweep_csv(report) -> str:
    lines = ["x,route,max_residual,mean_err,var_err,error"]
    for r in report.nodes:
        fields = [
            format(r.x, ".17g"),
            r.route,
            format(r.max_residual, ".17g"),
            "" if r.mean_err is None else format(r.mean_err, ".17g"),
            "" if r.var_err is None else format(r.var_err, ".17g"),
            "" if r.error is None else r.error.get("type", ""),
        ]
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def cmd_project(args) -> int:
    P = _params(args)
    xs = None if args.x is None else [_scalar(args, v) for v in args.x]
    report = projection_sweep(
        P, _scalar(args, args.t), _scalar(args, args.s), args.n_max, args.N, xs=xs, tol=args.tol, workers=_threads(args.threads)
    )
    data = report.to_dict()
    if args.csv:
        _write(_sweep_csv(report), args.csv)
    if args.json or not args.csv:
        _emit(data, args.json)
    if report.error is not None:
        raise CliError(EXIT_USAGE, report.error["type"], report.error.get("message", ""))
    return EXIT_OK if report.ok else EXIT_PROJECTION


def cmd_awmap(args) -> int:
    P = _params(args)
    t = _scalar(args, args.t)
    awp = aw_from_params(P, t)
    data = {
        "schema": "qproj.awmap/1",
        "params": _params_dict(P),
        "t": t,
        "a": awp.a,
        "a_sq": awp.a_sq,
        "b_plus_c": awp.b_plus_c,
        "bc": awp.bc,
        "d": 0,
        "alpha": awp.alpha,
        "alpha_A": awp.alpha_A,
        "alpha_C": awp.alpha_C,
    }
    if P.eta > 0:
        rep = shifted_equivalence_check(P, t, args.n_max)
        data["shifted_residual"] = rep.max_residual
        data["coefficient_residual"] = rep.coefficient_residual
    _emit(data)
    return EXIT_OK


def cmd_support(args) -> int:
    P = _params(args)
    t = _scalar(args, args.t)
    rep = support_classify(P, t, args.max_atoms)
    _emit(
        {
            "schema": "qproj.support/1",
            "params": _params_dict(P),
            "t": t,
            "lower_bound": rep.lower_bound,
            "atoms": list(rep.atoms),
            "atoms_truncated": rep.atoms_truncated,
            "k_star": rep.k_star,
            "m_star": rep.m_star,
            "y_star": rep.y_star,
            "z_star": rep.z_star,
        }
    )
    return EXIT_OK


def _suite_hhs(m):
    for n in range(1, m + 1):
        for k in range(1, n + 1):
            for j in range(1, k + 1):
                yield verify_HHs(n, k, j)


def _suite_hh0(m):
    for n in range(1, m + 1):
        for k in range(1, n + 1):
            for j in range(1, k + 1):
                yield verify_HH0(n, k, j)


def _suite_h2t(m):
    for n in range(m + 1):
        for k in range(n + 1):
            yield verify_H2_t_cancellation(n, k)


def _suite_gammas(m):
    for k in range(1, m + 1):
        yield from verify_boundary_gammas(k)


def _suite_pascal(m):
    for k in range(1, m + 1):
        for j in range(1, k + 1):
            yield ("pascal", (k, j), verify_pascal(k, j, Fraction(3, 7)))


def _suite_split(m):
    for k in range(m + 1):
        for j in range(k + 1):
            yield verify_splitting(k, j)


def _suite_delta(m):
    for k in range(1, m + 1):
        for r in range(k + 1):
            for n in range(k, m + 1):
                yield verify_delta_claim(k, r, n)


def _suite_beta(m):
    # exact cross-checks over a fixed rational parameter point
    P = Params(1, Fraction(1, 2), Fraction(3, 10), Fraction(7, 10))
    s = Fraction(2, 5)
    seed = [Fraction(3 * i * i - 5 * i + 2, 7 + i) for i in range(m + 1)]
    table = beta_by_recurrence(seed, P.q, m)
    for n in range(m + 1):
        for k in range(n + 1):
            yield ("beta-closed", (n, k), table[n, k] == beta_closed_form(seed, P.q, n, k))
    for k in range(1, m + 1):
        yield ("product", (k,), product_formula_check(P, k, Fraction(-3, 4), s)[2])
    for n in range(1, m + 1):
        for k in range(1, n + 1):
            yield ("zero-eval", (n, k), zero_evaluation_check(P, k, n, s)[2])


_SUITE_FUNCS = {
    "hhs": _suite_hhs,
    "hh0": _suite_hh0,
    "h2t": _suite_h2t,
    "gammas": _suite_gammas,
    "pascal": _suite_pascal,
    "split": _suite_split,
    "delta": _suite_delta,
    "beta": _suite_beta,
}


def _outcome(item):
    if isinstance(item, tuple):
        name, idx, ok = item
        return name, idx, bool(ok)
    return item.identity, item.indices, item.ok


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise CliError(EXIT_USAGE, "UsageError", f"unknown suite {args.suite!r}", choices=list(SUITES))
    if args.max_n < 1:
        raise CliError(EXIT_USAGE, "UsageError", "--max-n must be >= 1")
    names = [s for s in SUITES if s != "all"] if args.suite == "all" else [args.suite]
    counts, first_failure = {}, None
    for name in names:
        checked = failed = 0
        for item in _SUITE_FUNCS[name](args.max_n):
            ident, idx, ok = _outcome(item)
            checked += 1
            if not ok:
                failed += 1
                if first_failure is None:
                    first_failure = {"identity": ident, "indices": list(idx)}
        counts[name] = {"checked": checked, "failed": failed}
    _emit({"schema": "qproj.verify/1", "max_n": args.max_n, "suites": counts, "first_failure": first_failure})
    if first_failure is not None:
        raise CliError(EXIT_IDENTITY, "IdentityFailure", "nonzero certificate", **first_failure)
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "quad": cmd_quad,
    "project": cmd_project,
    "awmap": cmd_awmap,
    "support": cmd_support,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    """Run the CLI and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CliError as exc:
        code, err = exc.code, {"error": exc.kind, "message": str(exc), **exc.extra}
    except (DomainError, MixedBackendError, ValueError, OSError) as exc:
        code, err = EXIT_USAGE, {"error": type(exc).__name__, "message": str(exc)}
    except (NegativeProduct, ZeroPivotError, EigenConvergenceError, SingularSystemError, ArithmeticError) as exc:
        code, err = EXIT_NUMERIC, {"error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(dumps(err) + "\n")
    return code


def entry() -> None:
    sys.exit(main())
