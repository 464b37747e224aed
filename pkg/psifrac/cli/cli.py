import argparse
import logging
import sys
import typing as t

from ..catalog import Kind, names
from ..error import PsiFracError
from ..operand import Side
from ..operators import HilferMode
from ..verify import SUITES
from .commands import (
    handle_catalog,
    handle_converge,
    handle_eval,
    handle_list,
    handle_verify,
)


__all__ = [
    "build_parser",
    "main",
    "run",
]


LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"

_VERBOSITY = {1: logging.WARNING, 2: logging.INFO}
_HANDLER_NAME = "psifrac-cli"


def _add_quad_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--quad-nodes", type=int, default=None,
        help="Panels of the coarsest quadrature mesh.",
    )
    parser.add_argument(
        "--quad-tol", type=float, default=None,
        help="Target relative error of the quadrature.",
    )


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out", default=None,
        help="Output file; standard output by default.",
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument(
        "--workers", type=int, default=1,
        help="Threads evaluating the grid; row order is kept.",
    )


def _add_points(parser: argparse.ArgumentParser) -> None:
    points = parser.add_mutually_exclusive_group(required=True)
    points.add_argument("--x", type=float, help="Single evaluation point.")
    points.add_argument(
        "--grid", type=int,
        help="Number of points a + (b - a) i / N, i = 1..N.",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psifrac",
        description="Fractional integrals and derivatives with respect to "
                    "a function psi.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="Log to standard error; repeat for more detail.",
    )
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    # eval
    parser_eval = subparsers.add_parser(
        "eval", help="Evaluate a psi-fractional operator.",
    )
    parser_eval.add_argument(
        "--op", choices=("integral", "rl", "caputo", "hilfer"), required=True,
    )
    parser_eval.add_argument(
        "--side", choices=[s.value for s in Side], default=Side.LEFT.value,
    )
    parser_eval.add_argument("--alpha", type=float, required=True)
    parser_eval.add_argument(
        "--beta", type=float, default=0.0,
        help="Type of the Hilfer derivative.",
    )
    parser_eval.add_argument(
        "--mode", choices=[m.value for m in HilferMode],
        default=HilferMode.SEMIGROUP.value,
    )
    parser_eval.add_argument(
        "--psi", default="identity",
        help="identity, log, pow:<rho> or expr:<text>.",
    )
    parser_eval.add_argument("--f", required=True, help="Expression in x.")
    parser_eval.add_argument("--a", type=float, required=True)
    parser_eval.add_argument("--b", type=float, required=True)
    _add_points(parser_eval)
    _add_output_options(parser_eval)
    _add_quad_options(parser_eval)
    parser_eval.set_defaults(func=handle_eval)

    # catalog
    parser_catalog = subparsers.add_parser(
        "catalog", help="Evaluate a named classical operator.",
    )
    parser_catalog.add_argument("--list", action="store_true")
    parser_catalog.add_argument("--name", choices=names(), default=None)
    parser_catalog.add_argument(
        "--kind", choices=[k.value for k in Kind], default=Kind.INTEGRAL.value,
    )
    parser_catalog.add_argument(
        "--param", action="append", default=[], metavar="K=V",
        help="Operator parameter; repeatable.",
    )
    parser_catalog.add_argument("--alpha", type=float, default=None)
    parser_catalog.add_argument("--f", default=None)
    parser_catalog.add_argument("--a", type=float, default=None)
    parser_catalog.add_argument("--b", type=float, default=None)
    parser_catalog.add_argument(
        "--psi", default=None,
        help="Transform of psi_caputo and psi_riemann_liouville.",
    )
    points = parser_catalog.add_mutually_exclusive_group()
    points.add_argument("--x", type=float)
    points.add_argument("--grid", type=int)
    _add_output_options(parser_catalog)
    _add_quad_options(parser_catalog)
    parser_catalog.set_defaults(func=handle_catalog)

    # list
    parser_list = subparsers.add_parser(
        "list", help="Show catalog operators, suites and psi selectors.",
    )
    parser_list.set_defaults(func=handle_list)

    # verify
    parser_verify = subparsers.add_parser(
        "verify", help="Run a verification suite.",
    )
    parser_verify.add_argument(
        "--suite", choices=list(SUITES) + ["all"], default="all",
    )
    parser_verify.add_argument(
        "--tol", type=float, default=None,
        help="Replace every case's tolerance.",
    )
    _add_quad_options(parser_verify)
    parser_verify.set_defaults(func=handle_verify)

    # converge
    parser_converge = subparsers.add_parser(
        "converge", help="Observed order of the quadrature under refinement.",
    )
    parser_converge.add_argument("--alpha", type=float, required=True)
    parser_converge.add_argument(
        "--side", choices=[s.value for s in Side], default=Side.LEFT.value,
    )
    parser_converge.add_argument("--psi", default="identity")
    parser_converge.add_argument("--f", required=True)
    parser_converge.add_argument("--a", type=float, required=True)
    parser_converge.add_argument("--b", type=float, required=True)
    parser_converge.add_argument("--x", type=float, required=True)
    parser_converge.add_argument("--levels", type=int, default=5)
    parser_converge.add_argument("--out", default=None)
    parser_converge.add_argument(
        "--quad-nodes", type=int, default=None,
        help="Panels of the first level.",
    )
    parser_converge.set_defaults(func=handle_converge)

    return parser


def _configure_logging(verbose: int) -> None:
    if not verbose:
        return

    logger = logging.getLogger("psifrac")
    for old in [h for h in logger.handlers if h.get_name() == _HANDLER_NAME]:
        logger.removeHandler(old)

    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(handler)
    logger.setLevel(_VERBOSITY.get(verbose, logging.DEBUG))


def run(argv: t.Optional[t.Sequence[str]] = None) -> int:
    """Parse `argv` and run the command.

    Returns:
        0 on success, 1 when `verify` finds a failing case, 2 for usage
        errors and 3 for numeric failures.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)

    _configure_logging(args.verbose)
    if args.command == "catalog" and not args.list:
        missing = [
            flag for flag, value in (("--alpha", args.alpha), ("--f", args.f))
            if value is None
        ]
        if args.name is not None and args.x is None and args.grid is None:
            missing.append("--x or --grid")
        if missing:
            parser_error = f"catalog: missing {', '.join(missing)}"
            sys.stderr.write(f"psifrac: error: {parser_error}\n")
            return 2

    try:
        return args.func(args)
    except PsiFracError as err:
        sys.stderr.write(f"psifrac: error: {err}\n")
        return err.exit_code


def main() -> None:
    sys.exit(run())
