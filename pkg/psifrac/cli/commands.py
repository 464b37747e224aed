from argparse import Namespace
import concurrent.futures
import logging
import math
import sys
import typing as t

import numpy as np

from .. import catalog
from ..error import InvalidConfigError, InvalidDomainError, InvalidParameterError
from ..expr import parse
from ..operand import Operand, Side, coerce
from ..operators import (
    HilferMode,
    OrderSpec,
    caputo_image,
    evaluate_grid,
    hilfer_image,
    integral_image,
    rl_image,
)
from ..psi import PsiSpec, from_selector
from ..quad import EvalResult, QuadConfig, weakly_singular_integral
from ..specialfn import rgamma
from ..util.convert import format_real, parse_params
from ..verify import SUITES, format_report, run_suite
from .output import Row_t, render, write


__all__ = [
    "handle_catalog",
    "handle_converge",
    "handle_eval",
    "handle_list",
    "handle_verify",
]


logger = logging.getLogger(__name__)

# Meshes used by `converge` are never refined past their own size.
CONVERGE_TOL = 1e-3
CONVERGE_NODES = 16

_MIN_MAX_PANELS = 16384


# --------------------------------------------------------------------------
# Shared option handling

def quad_config(args: Namespace) -> QuadConfig:
    """QuadConfig with the `--quad-nodes` and `--quad-tol` overrides."""
    defaults = QuadConfig()
    nodes = defaults.nodes if args.quad_nodes is None else args.quad_nodes
    tol = defaults.tol if args.quad_tol is None else args.quad_tol
    return QuadConfig(
        nodes=nodes,
        tol=tol,
        max_panels=max(_MIN_MAX_PANELS, nodes * 4),
    )


def grid_points(
    x: t.Optional[float],
    grid: t.Optional[int],
    a: float,
    b: float,
) -> t.List[float]:
    """The single point `x`, or `grid` points uniform over (a, b].

    Raises:
        InvalidParameterError: Raised if neither or both are given, or if
            the grid has fewer than 2 points.
    """
    if (x is None) == (grid is None):
        raise InvalidParameterError("give exactly one of --x and --grid")
    if x is not None:
        return [float(x)]
    if grid < 2:
        raise InvalidParameterError(f"--grid needs at least 2 points, got {grid}")
    return [a + (b - a) * i / grid for i in range(1, grid + 1)]


def _check_interval(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise InvalidDomainError(f"need a < b, got a={a!r}, b={b!r}")


def _chunks(xs: t.Sequence[float], count: int) -> t.List[t.List[float]]:
    size = max(1, math.ceil(len(xs) / count))
    return [list(xs[i:i + size]) for i in range(0, len(xs), size)]


def evaluate_points(
    func: t.Callable[[t.List[float]], t.List[EvalResult]],
    xs: t.Sequence[float],
    workers: int = 1,
) -> t.List[Row_t]:
    """Evaluate `func` over chunks of `xs`, concurrently if `workers` > 1.

    Rows come back in the order of `xs` whatever the completion order.
    """
    if workers < 1:
        raise InvalidParameterError(f"--workers must be >= 1, got {workers}")

    chunks = _chunks(xs, workers)
    if workers == 1 or len(chunks) == 1:
        results = [func(chunk) for chunk in chunks]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(func, chunks))

    rows: t.List[Row_t] = []
    for chunk, values in zip(chunks, results):
        rows.extend(zip(chunk, values))
    return rows


def _emit(args: Namespace, inputs: t.Mapping[str, t.Any], rows: t.Sequence[Row_t]) -> None:
    for x, result in rows:
        for note in result.notes:
            logger.info("x=%s: %s", format_real(x), note)
    write(render(args.format, inputs, rows), args.out)


# --------------------------------------------------------------------------
# eval

def _operator_image(
    args: Namespace,
    psi: PsiSpec,
    f: Operand,
    config: QuadConfig,
) -> Operand:
    side = Side(args.side)
    if args.op == "integral":
        return integral_image(psi, args.alpha, side, f, config)
    if args.op == "rl":
        return rl_image(psi, args.alpha, side, f, config)
    if args.op == "caputo":
        return caputo_image(psi, args.alpha, side, f, config)
    order = OrderSpec(args.alpha, args.beta)
    return hilfer_image(psi, order, side, f, config, HilferMode(args.mode))


def _eval_inputs(args: Namespace, psi: PsiSpec, config: QuadConfig) -> t.Dict[str, t.Any]:
    return {
        "command": "eval",
        "op": args.op,
        "side": args.side,
        "alpha": args.alpha,
        "beta": args.beta,
        "mode": args.mode,
        "psi": psi.describe(),
        "f": args.f,
        "a": args.a,
        "b": args.b,
        "x": args.x,
        "grid": args.grid,
        "quad_nodes": config.nodes,
        "quad_tol": config.tol,
    }


def handle_eval(args: Namespace) -> int:
    _check_interval(args.a, args.b)
    config = quad_config(args)
    psi = from_selector(args.psi, (args.a, args.b))
    xs = grid_points(args.x, args.grid, args.a, args.b)
    for x in xs:
        if not (args.a <= x <= args.b):
            raise InvalidDomainError(
                f"x={x!r} lies outside [{args.a!r}, {args.b!r}]"
            )

    f = coerce(parse(args.f), psi, config)
    image = _operator_image(args, psi, f, config)
    logger.info(
        "eval %s alpha=%g beta=%g at %d point(s)",
        args.op, args.alpha, args.beta, len(xs),
    )
    rows = evaluate_points(lambda chunk: evaluate_grid(image, chunk), xs, args.workers)
    _emit(args, _eval_inputs(args, psi, config), rows)
    return 0


# --------------------------------------------------------------------------
# catalog / list

def _registry_text() -> str:
    lines = []
    for info in catalog.list_presets():
        params = ",".join(info.parameters) or "-"
        lines.append(
            f"{info.name:<22} {'/'.join(info.kinds):<20} {params:<16} "
            f"{info.citation}"
        )
    return "\n".join(lines) + "\n"


def handle_catalog(args: Namespace) -> int:
    if args.list:
        sys.stdout.write(_registry_text())
        return 0
    if args.name is None:
        raise InvalidParameterError("catalog needs --name or --list")

    preset = catalog.resolve(args.name, parse_params(args.param))
    config = quad_config(args)

    domain = None
    if args.a is not None and args.b is not None:
        _check_interval(args.a, args.b)
        domain = (args.a, args.b)
    psi = from_selector(args.psi, domain) if args.psi and domain else None

    if args.grid is not None and domain is None:
        raise InvalidDomainError("--grid needs --a and --b")
    lo, hi = domain if domain is not None else (0.0, 0.0)
    xs = grid_points(args.x, args.grid, lo, hi)

    def run(chunk: t.List[float]) -> t.List[EvalResult]:
        return [
            catalog.apply(
                preset, args.kind, args.alpha, args.f, x, config, domain, psi,
            )
            for x in chunk
        ]

    rows = evaluate_points(run, xs, args.workers)
    inputs = {
        "command": "catalog",
        "name": preset.name,
        "kind": args.kind,
        "alpha": args.alpha,
        "params": dict(sorted(preset.params.items())),
        "psi": psi.describe() if psi is not None else None,
        "f": args.f,
        "a": args.a,
        "b": args.b,
        "x": args.x,
        "grid": args.grid,
        "quad_nodes": config.nodes,
        "quad_tol": config.tol,
    }
    _emit(args, inputs, rows)
    return 0


def handle_list(args: Namespace) -> int:
    out = ["catalog operators:"]
    out.append(_registry_text().rstrip("\n"))
    out.append("")
    out.append("verify suites: " + ", ".join(list(SUITES) + ["all"]))
    out.append("psi selectors: identity, log, pow:<rho>, expr:<text>")
    sys.stdout.write("\n".join(out) + "\n")
    return 0


# --------------------------------------------------------------------------
# verify

def handle_verify(args: Namespace) -> int:
    if args.tol is not None and not args.tol > 0.0:
        raise InvalidParameterError(f"--tol must be positive, got {args.tol!r}")

    outcomes = run_suite(args.suite, args.tol, quad_config(args))
    sys.stdout.write(format_report(outcomes, color=sys.stdout.isatty()))
    return 0 if all(o.passed for o in outcomes) else 1


# --------------------------------------------------------------------------
# converge

def _level_config(nodes: int) -> QuadConfig:
    return QuadConfig(
        nodes=nodes, refinement=1, tol=CONVERGE_TOL, max_panels=nodes * 2,
    )


def _integral_at(
    psi: PsiSpec,
    f: Operand,
    alpha: float,
    side: Side,
    x: float,
    config: QuadConfig,
) -> EvalResult:
    # the psi-fractional integral written in s = psi(t), integrated directly
    # so that the whole integrand goes through the product rule
    def g(s: np.ndarray) -> np.ndarray:
        return np.asarray(f(psi.inverse(s)), dtype=float)

    lo, hi = psi.s_bounds
    sx = float(psi.value(x))
    if side is Side.LEFT:
        result = weakly_singular_integral(g, lo, sx, alpha, True, config)
    else:
        result = weakly_singular_integral(g, sx, hi, alpha, False, config)
    return result.scale(rgamma(alpha))


def observed_orders(values: t.Sequence[float]) -> t.List[t.Tuple[float, float]]:
    """(difference, observed order) per level; nan where undefined."""
    rows: t.List[t.Tuple[float, float]] = []
    previous = math.nan
    for i, value in enumerate(values):
        diff = abs(value - values[i - 1]) if i else math.nan
        order = math.nan
        if i >= 2 and diff > 0.0 and previous > 0.0:
            order = math.log2(previous / diff)
        rows.append((diff, order))
        previous = diff
    return rows


def handle_converge(args: Namespace) -> int:
    _check_interval(args.a, args.b)
    if args.levels < 3:
        raise InvalidParameterError(f"--levels must be >= 3, got {args.levels}")
    if not args.a <= args.x <= args.b:
        raise InvalidDomainError(
            f"x={args.x!r} lies outside [{args.a!r}, {args.b!r}]"
        )

    base = CONVERGE_NODES if args.quad_nodes is None else args.quad_nodes
    if base < 9:
        raise InvalidConfigError(f"--quad-nodes must be >= 9, got {base}")
    psi = from_selector(args.psi, (args.a, args.b))
    f = coerce(parse(args.f), psi)
    side = Side(args.side)

    results = []
    for level in range(args.levels):
        config = _level_config(base * 2 ** level)
        results.append(_integral_at(psi, f, args.alpha, side, args.x, config))
        logger.debug("level %d: %d panels", level, results[-1].panels_used)

    lines = ["level,panels,value,difference,order"]
    orders = observed_orders([r.value for r in results])
    for level, (result, (diff, order)) in enumerate(zip(results, orders)):
        lines.append(",".join((
            str(level),
            str(result.panels_used),
            format_real(result.value),
            format_real(diff),
            format_real(order),
        )))
    write("\n".join(lines) + "\n", args.out)
    return 0
