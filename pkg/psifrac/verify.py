"""Verification suites: operator output against identities and closed forms.

Each suite returns one `CaseOutcome` per checked case. Failures inside a
case (any `PsiFracError`) are reported as failed outcomes and never abort
the suite.
"""

from __future__ import annotations

import math
import random
import typing as t

import numpy as np

from . import catalog
from .expr import to_text
from .error import PsiFracError, UnknownNameError
from .oracles import (
    OracleCase,
    OracleKind,
    bound_constant,
    builtin_cases,
    eigen_deviation,
    interior_grid,
    ml_eigen,
    power_integral,
    power_text,
    standard_psis,
)
from .operand import Operand, PowerTerm, Side, coerce, distance
from .operators import (
    OrderSpec,
    evaluate_grid,
    hilfer_image,
    integral_image,
    inversion_residual,
    norm_c_gamma,
    norm_cn_gamma,
)
from .psi import PsiSpec, make_preset
from .quad import QuadConfig, weakly_singular_integral
from .util.string import status_label


__all__ = [
    "SUITES",
    "CaseOutcome",
    "format_report",
    "run_suite",
]


SEMIGROUP_TOLERANCE = 1e-6
INVERSION_TOLERANCE = 1e-5
KERNEL_TOLERANCE = 5e-5
DEVIATION_TOLERANCE = 1e-3
BOUND_SLACK = 1e-6
ANCHOR_TOLERANCE = 1e-8
CATALOG_TOLERANCE = 1e-6
LIPSCHITZ_SLACK = 1e-8

BOUND_SAMPLES = 20
LIPSCHITZ_POINTS = 101
_SEED = 20160101

# Gamma(1/4), tabulated independently of specialfn
_GAMMA_QUARTER = 3.6256099082219083119

Suite_t = t.Callable[[t.Optional[float], QuadConfig], t.List["CaseOutcome"]]
Measured_t = t.Union[float, t.Tuple[float, str]]


class CaseOutcome(t.NamedTuple):
    """Result of one verification case.

    `measured` is the case's error measure (relative or absolute as the
    suite defines it) and `passed` means `measured <= tolerance`.
    """

    suite: str
    name: str
    measured: float
    tolerance: float
    passed: bool
    citation: str
    note: str = ""


def _outcome(
    suite: str,
    name: str,
    measure: t.Callable[[], Measured_t],
    tolerance: float,
    citation: str,
) -> CaseOutcome:
    # a measure may return (value, note) to attach context to the report
    note = ""
    try:
        result = measure()
        if isinstance(result, tuple):
            result, note = result
        measured = float(result)
    except PsiFracError as err:
        return CaseOutcome(
            suite, name, math.inf, tolerance, False, citation,
            f"{type(err).__name__}: {err}",
        )
    passed = bool(measured <= tolerance)
    return CaseOutcome(suite, name, measured, tolerance, passed, citation, note)


def _relative(values: t.Sequence[float], expected: t.Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    e = np.asarray(expected, dtype=float)
    return float(np.max(np.abs(v - e) / np.maximum(np.abs(e), 1e-300)))


def _absolute(values: t.Sequence[float], expected: t.Sequence[float]) -> float:
    v = np.asarray(values, dtype=float)
    e = np.asarray(expected, dtype=float)
    return float(np.max(np.abs(v - e)))


def _image(case: OracleCase, config: QuadConfig) -> Operand:
    if case.kind is OracleKind.INTEGRAL:
        return integral_image(
            case.psi, case.order.alpha, case.side, case.function, config
        )
    return hilfer_image(case.psi, case.order, case.side, case.function, config)


def measure_case(case: OracleCase, config: QuadConfig) -> float:
    """Largest relative deviation of an oracle case over its points."""
    results = evaluate_grid(_image(case, config), case.xs)
    return _relative([r.value for r in results], case.expected_values())


def _oracle_suite(
    suite: str,
) -> Suite_t:
    def run(tol: t.Optional[float], config: QuadConfig) -> t.List[CaseOutcome]:
        return [
            _outcome(
                suite, case.name, lambda case=case: measure_case(case, config),
                tol or case.tolerance, case.citation,
            )
            for case in builtin_cases() if case.suite == suite
        ]
    return run


def _ml_suite(tol: t.Optional[float], config: QuadConfig) -> t.List[CaseOutcome]:
    outcomes = _oracle_suite("ml")(tol, config)

    # types beta < 1 differ from lam * f by the boundary term of f(a) = 1
    for label, psi in standard_psis()[:2]:
        xs = interior_grid(psi)
        lo = psi.s_bounds[0]
        body = f"({to_text(psi.psi)}) - ({lo!r})"
        for alpha in (0.4, 0.8):
            for lam in (0.5, 1.0):
                function = f"mlf({alpha!r}, {lam!r} * ({body})^{alpha!r})"
                order = OrderSpec(alpha, 0.5)

                def measure(psi=psi, order=order, function=function,
                            alpha=alpha, lam=lam, xs=xs) -> float:
                    image = hilfer_image(psi, order, Side.LEFT, function, config)
                    values = [r.value for r in evaluate_grid(image, xs)]
                    deviation = [
                        v - ml_eigen(psi, alpha, lam, x)
                        for v, x in zip(values, xs)
                    ]
                    predicted = [eigen_deviation(psi, alpha, x) for x in xs]
                    return _relative(deviation, predicted)

                outcomes.append(_outcome(
                    "ml", f"deviation-{label}-a{alpha}-l{lam}", measure,
                    tol or DEVIATION_TOLERANCE,
                    "boundary term of Hilfer derivatives of type beta < 1",
                ))
    return outcomes


def _semigroup_suite(
    tol: t.Optional[float],
    config: QuadConfig,
) -> t.List[CaseOutcome]:
    outcomes = []
    pairs = ((0.3, 0.7), (0.7, 1.2), (1.2, 0.3))
    for label, psi in standard_psis():
        xs = interior_grid(psi)
        for alpha, beta in pairs:
            for function in ("1", "x", "sin(x)"):

                def measure(psi=psi, alpha=alpha, beta=beta,
                            function=function, xs=xs) -> Measured_t:
                    inner = integral_image(psi, beta, Side.LEFT, function, config)
                    nested = evaluate_grid(
                        integral_image(psi, alpha, Side.LEFT, inner, config), xs,
                    )
                    direct = evaluate_grid(
                        integral_image(
                            psi, alpha + beta, Side.LEFT, function, config,
                        ),
                        xs,
                    )
                    allowance = max(
                        3.0 * (n.err_est + d.err_est)
                        for n, d in zip(nested, direct)
                    )
                    deviation = _absolute(
                        [n.value for n in nested], [d.value for d in direct],
                    )
                    return deviation, f"err_est allowance {allowance:.3g}"

                outcomes.append(_outcome(
                    "semigroup", f"semigroup-{label}-{alpha}+{beta}-{function}",
                    measure, tol or SEMIGROUP_TOLERANCE,
                    "semigroup property of psi-fractional integrals",
                ))

        for k in (2, 3):
            outcomes.extend(_iterated(label, psi, k, tol, config))
    return outcomes


def _iterated(
    label: str,
    psi: PsiSpec,
    k: int,
    tol: t.Optional[float],
    config: QuadConfig,
) -> t.List[CaseOutcome]:
    # h = Caputo derivative of Delta^2, a nonconstant function vanishing at a
    alpha = 0.5
    xs = interior_grid(psi)
    h = hilfer_image(
        psi, OrderSpec(alpha, 1.0), Side.LEFT, power_text(psi, Side.LEFT, 2.0),
        config,
    )

    cache: t.List[t.Tuple[t.List[float], t.List[float]]] = []

    def iterate() -> t.Tuple[t.List[float], t.List[float]]:
        if cache:
            return cache[0]
        image: t.Any = h
        for _ in range(k):
            image = integral_image(psi, alpha, Side.LEFT, image, config)
        once = integral_image(psi, k * alpha, Side.LEFT, h, config)
        cache.append((
            [r.value for r in evaluate_grid(image, xs)],
            [r.value for r in evaluate_grid(once, xs)],
        ))
        return cache[0]

    def semigroup() -> float:
        repeated, once = iterate()
        return _absolute(repeated, once)

    def mean_value() -> float:
        _, once = iterate()
        worst = 0.0
        for x, value in zip(xs, once):
            d = float(distance(psi, Side.LEFT, psi.value(x)))
            ratio = value / (d ** (k * alpha) / math.gamma(k * alpha + 1.0))
            samples = np.linspace(psi.a, x, 101)
            hv = h(samples)
            lo, hi = float(np.min(hv)), float(np.max(hv))
            worst = max(worst, lo - ratio, ratio - hi)
        return max(worst, 0.0)

    citation = "iterated integrals of Hilfer derivatives"
    return [
        _outcome(
            "semigroup", f"iterated-{label}-k{k}", semigroup,
            tol or SEMIGROUP_TOLERANCE, citation,
        ),
        _outcome(
            "semigroup", f"mean-value-{label}-k{k}", mean_value,
            tol or SEMIGROUP_TOLERANCE, citation,
        ),
    ]


def _inversion_suite(
    tol: t.Optional[float],
    config: QuadConfig,
) -> t.List[CaseOutcome]:
    outcomes = []
    for label, psi in standard_psis():
        xs = interior_grid(psi)
        for alpha in (0.3, 0.8):
            for beta in (0.0, 0.5, 1.0):
                order = OrderSpec(alpha, beta)
                for function in ("exp(x)", "1 + x^2"):
                    name = f"{label}-a{alpha}-b{beta}-{function}"
                    f_values = coerce(function, psi)(np.asarray(xs))

                    def left_inverse(psi=psi, order=order,
                                     function=function, f_values=f_values,
                                     xs=xs) -> float:
                        inner = integral_image(
                            psi, order.alpha, Side.LEFT, function, config,
                        )
                        image = hilfer_image(psi, order, Side.LEFT, inner, config)
                        values = [r.value for r in evaluate_grid(image, xs)]
                        return _relative(values, f_values)

                    def residual(psi=psi, order=order,
                                 function=function, f_values=f_values,
                                 xs=xs) -> float:
                        inner = hilfer_image(
                            psi, order, Side.LEFT, function, config,
                        )
                        image = integral_image(
                            psi, order.alpha, Side.LEFT, inner, config,
                        )
                        values = [r.value for r in evaluate_grid(image, xs)]
                        expected = [
                            fv - inversion_residual(psi, order, function, x, config)
                            for fv, x in zip(f_values, xs)
                        ]
                        return _relative(values, expected)

                    outcomes.append(_outcome(
                        "inversion", f"left-inverse-{name}", left_inverse,
                        tol or INVERSION_TOLERANCE,
                        "Hilfer derivative as left inverse of the integral",
                    ))
                    outcomes.append(_outcome(
                        "inversion", f"residual-{name}", residual,
                        tol or INVERSION_TOLERANCE,
                        "integral of the Hilfer derivative with boundary "
                        "residual",
                    ))

                for k in range(1, order.n + 1):

                    def kernel(psi=psi, order=order, k=k, xs=xs) -> float:
                        term = PowerTerm(1.0, order.gamma_h - k, Side.LEFT)
                        f = Operand(psi, None, (term,))
                        image = hilfer_image(psi, order, Side.LEFT, f, config)
                        return _absolute(
                            [r.value for r in evaluate_grid(image, xs)],
                            [0.0] * len(xs),
                        )

                    outcomes.append(_outcome(
                        "inversion", f"kernel-{label}-a{alpha}-b{beta}-k{k}",
                        kernel, tol or KERNEL_TOLERANCE,
                        "kernel of the Hilfer derivative",
                    ))
    return outcomes


def _random_function(rng: random.Random) -> str:
    c0, c1 = rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)
    c2, w = rng.uniform(-1.0, 1.0), rng.uniform(0.5, 3.0)
    return f"{c0!r} + {c1!r} * x + {c2!r} * sin({w!r} * x)"


def _bounds_suite(
    tol: t.Optional[float],
    config: QuadConfig,
) -> t.List[CaseOutcome]:
    outcomes = []
    unit = make_preset("identity", (), (0.0, 1.0))
    order = OrderSpec(0.5, 0.5)
    expected_k = 16.0 / _GAMMA_QUARTER ** 2
    outcomes.append(_outcome(
        "bounds", "bound-constant-unit",
        lambda: abs(bound_constant(unit, order) - expected_k),
        tol or ANCHOR_TOLERANCE, "boundedness constant of Hilfer derivatives",
    ))

    rng = random.Random(_SEED)
    for label, psi in standard_psis():
        k_bound = bound_constant(psi, order)
        for i in range(BOUND_SAMPLES):
            function = _random_function(rng)

            def ratio(psi=psi, function=function, k_bound=k_bound) -> float:
                image = hilfer_image(psi, order, Side.LEFT, function, config)
                top = norm_c_gamma(psi, order.gamma_h, image)
                bottom = norm_cn_gamma(psi, order, function, config=config)
                return top / bottom - k_bound

            outcomes.append(_outcome(
                "bounds", f"norm-ratio-{label}-{i}", ratio,
                BOUND_SLACK, "boundedness of Hilfer derivatives",
            ))

        for alpha in (0.3, 0.5, 0.8):
            for n in (1, 10, 100):

                def lipschitz(psi=psi, alpha=alpha, n=n) -> float:
                    xs = np.linspace(psi.a, psi.b, LIPSCHITZ_POINTS)
                    shifted = integral_image(
                        psi, alpha, Side.LEFT, f"x + {1.0 / n!r}", config,
                    )(xs)
                    plain = integral_image(psi, alpha, Side.LEFT, "x", config)(xs)
                    lo, hi = psi.s_bounds
                    bound = (hi - lo) ** alpha / math.gamma(alpha + 1.0) / n
                    return float(np.max(np.abs(shifted - plain))) - bound

                outcomes.append(_outcome(
                    "bounds", f"lipschitz-{label}-a{alpha}-n{n}", lipschitz,
                    LIPSCHITZ_SLACK,
                    "uniform convergence under psi-fractional integrals",
                ))
    return outcomes


# --------------------------------------------------------------------------
# Direct kernels in the original variable t

def _kernel_quotient(
    x: float,
    phi: t.Callable[[np.ndarray], np.ndarray],
    alpha: float,
) -> t.Callable[[np.ndarray], np.ndarray]:
    # ((phi(x) - phi(t)) / (x - t))^(alpha-1); 0/0 at t = x is patched by quad
    def factor(s: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return ((phi(np.asarray(x)) - phi(s)) / (x - s)) ** (alpha - 1.0)
    return factor


def _direct_hadamard(alpha: float, x: float, config: QuadConfig) -> float:
    # 1/Gamma(alpha) int_1^x (ln(x/t))^(alpha-1) f(t) dt/t with f(t) = t,
    # so f(t)/t = 1
    factor = _kernel_quotient(x, np.log, alpha)
    result = weakly_singular_integral(
        factor, 1.0, x, alpha, config=config, removable_endpoints=True,
    )
    return result.value / math.gamma(alpha)


def _direct_katugampola(alpha: float, rho: float, x: float, config: QuadConfig) -> float:
    # rho^(1-alpha)/Gamma(alpha) int_0^x t^(rho-1) (x^rho - t^rho)^(alpha-1) f
    # with f(t) = t
    factor = _kernel_quotient(x, lambda s: np.power(s, rho), alpha)
    result = weakly_singular_integral(
        lambda s: factor(s) * np.power(s, rho - 1.0) * s, 0.0, x, alpha,
        config=config, removable_endpoints=True,
    )
    return rho ** (1.0 - alpha) * result.value / math.gamma(alpha)


def _direct_erdelyi_kober(alpha: float, x: float, config: QuadConfig) -> float:
    # sigma = 1, eta = 0: x^(-alpha)/Gamma(alpha) int_0^x (x-t)^(alpha-1) t dt
    result = weakly_singular_integral(lambda s: s, 0.0, x, alpha, config=config)
    return x ** -alpha * result.value / math.gamma(alpha)


def _series_prabhakar(
    alpha: float,
    beta: float,
    gamma_p: float,
    omega: float,
    x: float,
) -> float:
    # f = 1 on [0, x], summed term by term:
    # sum (gamma_p)_k omega^k x^(alpha(k+1)) / (k! Gamma(alpha k + beta) alpha(k+1))
    total = 0.0
    pochhammer = 1.0
    for k in range(200):
        if k:
            pochhammer *= (gamma_p + k - 1) / k
        term = pochhammer * omega ** k * x ** (alpha * (k + 1)) / (
            math.gamma(alpha * k + beta) * alpha * (k + 1)
        )
        total += term
        if k > 3 and abs(term) < 1e-17 * max(abs(total), 1e-300):
            break
    return total


def _catalog_suite(
    tol: t.Optional[float],
    config: QuadConfig,
) -> t.List[CaseOutcome]:
    outcomes = []
    alphas = (0.3, 0.5, 0.8)
    citation = "reduction to classical operators"

    def add(name: str, measure: t.Callable[[], float]) -> None:
        outcomes.append(_outcome(
            "catalog", name, measure, tol or CATALOG_TOLERANCE, citation,
        ))

    log_xs = interior_grid(make_preset("log", (), (1.0, math.e)))
    unit_xs = interior_grid(make_preset("identity", (), (0.0, 1.0)))

    for alpha in alphas:
        def hadamard(alpha=alpha) -> float:
            preset = catalog.resolve("hadamard")
            values = [
                catalog.apply(
                    preset, "integral", alpha, "x", x, config, (1.0, math.e),
                ).value
                for x in log_xs
            ]
            return _relative(
                values, [_direct_hadamard(alpha, x, config) for x in log_xs],
            )

        def katugampola(alpha=alpha) -> float:
            preset = catalog.resolve("katugampola", {"rho": 2.0})
            values = [
                catalog.apply(
                    preset, "integral", alpha, "x", x, config, (0.0, 1.0),
                ).value
                for x in unit_xs
            ]
            return _relative(
                values,
                [_direct_katugampola(alpha, 2.0, x, config) for x in unit_xs],
            )

        def erdelyi_kober(alpha=alpha) -> float:
            preset = catalog.resolve("erdelyi_kober", {"sigma": 1.0, "eta": 0.0})
            values = [
                catalog.apply(
                    preset, "integral", alpha, "x", x, config, (0.0, 1.0),
                ).value
                for x in unit_xs
            ]
            return _relative(
                values,
                [_direct_erdelyi_kober(alpha, x, config) for x in unit_xs],
            )

        add(f"hadamard-a{alpha}", hadamard)
        add(f"katugampola-rho2-a{alpha}", katugampola)
        add(f"erdelyi-kober-a{alpha}", erdelyi_kober)

        for gamma_p, beta, omega in ((0.0, alpha, 1.0), (0.5, 0.7, -1.0)):
            def prabhakar(alpha=alpha, gamma_p=gamma_p, beta=beta,
                          omega=omega) -> float:
                preset = catalog.resolve(
                    "prabhakar", {"beta": beta, "gamma": gamma_p, "omega": omega},
                )
                values = [
                    catalog.apply(
                        preset, "integral", alpha, "1", x, config, (0.0, 1.0),
                    ).value
                    for x in unit_xs
                ]
                return _relative(values, [
                    _series_prabhakar(alpha, beta, gamma_p, omega, x)
                    for x in unit_xs
                ])

            add(f"prabhakar-a{alpha}-g{gamma_p}", prabhakar)

        def riemann_liouville(alpha=alpha) -> float:
            preset = catalog.resolve("riemann_liouville")
            values = [
                catalog.apply(
                    preset, "integral", alpha, "1", x, config, (0.0, 1.0),
                ).value
                for x in unit_xs
            ]
            psi = make_preset("identity", (), (0.0, 1.0))
            return _relative(
                values,
                [power_integral(psi, alpha, 1.0, Side.LEFT, x) for x in unit_xs],
            )

        add(f"riemann-liouville-a{alpha}", riemann_liouville)
    return outcomes


SUITES: t.Dict[str, Suite_t] = {
    "power": _oracle_suite("power"),
    "ml": _ml_suite,
    "semigroup": _semigroup_suite,
    "inversion": _inversion_suite,
    "bounds": _bounds_suite,
    "catalog": _catalog_suite,
}


def run_suite(
    name: str,
    tol: t.Optional[float] = None,
    config: t.Optional[QuadConfig] = None,
) -> t.List[CaseOutcome]:
    """Run one suite, or every suite for `all`.

    Args:
        name: Suite name.
        tol: Replaces every case's own tolerance when given.
        config: Quadrature controls.

    Raises:
        UnknownNameError: Raised if the suite does not exist.
    """
    config = config or QuadConfig()
    if name == "all":
        outcomes: t.List[CaseOutcome] = []
        for suite in SUITES.values():
            outcomes.extend(suite(tol, config))
        return outcomes
    try:
        suite = SUITES[name]
    except KeyError:
        raise UnknownNameError(
            f"unknown suite '{name}'; expected one of "
            f"{', '.join(list(SUITES) + ['all'])}"
        )
    return suite(tol, config)


def format_report(outcomes: t.Sequence[CaseOutcome], color: bool = False) -> str:
    lines = []
    for o in outcomes:
        line = (
            f"{status_label(o.passed, color)} {o.suite}/{o.name} "
            f"measured={o.measured:.3g} tol={o.tolerance:.3g} ({o.citation})"
        )
        if o.note:
            line += f" [{o.note}]"
        lines.append(line)

    failed = sum(1 for o in outcomes if not o.passed)
    lines.append(f"{len(outcomes) - failed} passed, {failed} failed")
    return "\n".join(lines)
