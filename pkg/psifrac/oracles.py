"""Closed-form reference values for the psi-fractional operators.

The `verify` suites and the test cases compare operator output with these
formulas. Power laws refer to the function (psi(t) - psi(a))^(delta - 1),
mirrored to (psi(b) - psi(t))^(delta - 1) on the right side.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import typing as t

from . import expr
from .error import InvalidParameterError
from .operand import Side, distance
from .operators import OrderSpec
from .psi import PsiSpec, make_preset
from .specialfn import MLParams, gamma, mittag_leffler, rgamma


__all__ = [
    "OracleCase",
    "OracleKind",
    "bound_constant",
    "builtin_cases",
    "eigen_deviation",
    "interior_grid",
    "ml_eigen",
    "power_derivative",
    "power_integral",
    "power_text",
    "rl_power",
    "standard_psis",
]


GRID_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)
POWER_ALPHAS = (0.3, 0.5, 0.8)
POWER_BETAS = (0.0, 0.5, 1.0)
EIGEN_LAMBDAS = (0.5, 1.0)
EIGEN_ALPHAS = (0.4, 0.8)

POWER_TOLERANCE = 1e-6
EIGEN_TOLERANCE = 1e-4


def _delta(psi: PsiSpec, side: Side, x: float) -> float:
    return float(distance(psi, side, psi.value(float(x))))


def power_integral(
    psi: PsiSpec,
    alpha: float,
    delta: float,
    side: Side,
    x: float,
) -> float:
    """Gamma(delta)/Gamma(alpha+delta) * Delta^(alpha+delta-1).

    Raises:
        InvalidParameterError: Raised if delta is not positive.
    """
    if not delta > 0.0:
        raise InvalidParameterError(f"delta must be positive, got {delta!r}")
    d = _delta(psi, side, x)
    return gamma(delta) / gamma(alpha + delta) * d ** (alpha + delta - 1.0)


def power_derivative(
    psi: PsiSpec,
    order: OrderSpec,
    delta: float,
    side: Side,
    x: float,
) -> float:
    """Gamma(delta)/Gamma(delta-alpha) * Delta^(delta-alpha-1).

    The same value for every type beta as long as delta > n.

    Raises:
        InvalidParameterError: Raised if delta <= n.
    """
    if not delta > order.n:
        raise InvalidParameterError(
            f"delta must exceed n={order.n}, got {delta!r}"
        )
    d = _delta(psi, side, x)
    return gamma(delta) * rgamma(delta - order.alpha) * d ** (
        delta - order.alpha - 1.0
    )


def rl_power(
    psi: PsiSpec,
    alpha: float,
    delta: float,
    side: Side,
    x: float,
) -> float:
    """Riemann-Liouville derivative of Delta^(delta-1) for any delta > 0.

    Zero when delta - alpha is a pole of Gamma, which is how the kernel
    functions Delta^(alpha-k) are annihilated.
    """
    if not delta > 0.0:
        raise InvalidParameterError(f"delta must be positive, got {delta!r}")
    r = rgamma(delta - alpha)
    if r == 0.0:
        return 0.0
    d = _delta(psi, side, x)
    return gamma(delta) * r * d ** (delta - alpha - 1.0)


def ml_eigen(psi: PsiSpec, alpha: float, lam: float, x: float) -> float:
    """lam * E_alpha(lam * Delta^alpha): the Caputo derivative of the
    eigenfunction E_alpha(lam * Delta^alpha).
    """
    if not lam > 0.0:
        raise InvalidParameterError(f"lambda must be positive, got {lam!r}")
    d = _delta(psi, Side.LEFT, x)
    return lam * float(mittag_leffler(MLParams(alpha), lam * d ** alpha))


def eigen_deviation(psi: PsiSpec, alpha: float, x: float) -> float:
    """Excess of a Hilfer derivative of type beta < 1 over lam * f for the
    eigenfunction f, which comes from f(a) = 1 alone:
    Delta^(-alpha) / Gamma(1 - alpha), 0 < alpha < 1.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha!r}")
    d = _delta(psi, Side.LEFT, x)
    return d ** -alpha * rgamma(1.0 - alpha)


def bound_constant(psi: PsiSpec, order: OrderSpec) -> float:
    """Constant K of the boundedness estimate of the Hilfer derivative
    from C^n_gamma into C_gamma:

        K = (psi(b)-psi(a))^(n-alpha)
            / ((n-gamma)(gamma-alpha) Gamma(n-gamma) Gamma(gamma-alpha))

    Returns +inf when either factor vanishes (beta in {0, 1}, integer
    alpha).
    """
    n = order.n
    gamma_h = order.gamma_h
    if order.is_integer or n - gamma_h <= 0.0 or gamma_h - order.alpha <= 0.0:
        return math.inf
    lo, hi = psi.s_bounds
    return (hi - lo) ** (n - order.alpha) / (
        (n - gamma_h)
        * (gamma_h - order.alpha)
        * gamma(n - gamma_h)
        * gamma(gamma_h - order.alpha)
    )


# --------------------------------------------------------------------------
# Built-in cases

class OracleKind(enum.Enum):

    INTEGRAL = "integral"
    HILFER = "hilfer"


@dataclasses.dataclass(frozen=True)
class OracleCase:
    """One operator evaluation with its closed-form expectation.

    Args:
        suite: Verification suite the case belongs to.
        name: Identifier, unique within the registry.
        kind: Operator to run.
        psi: Transform and interval.
        order: Order (and type for derivatives).
        side: Side of the operator.
        function: Input as expression text in x.
        xs: Evaluation points.
        expected: Closed form at a point.
        tolerance: Allowed relative error.
        citation: Identity the case checks.
    """

    suite: str
    name: str
    kind: OracleKind
    psi: PsiSpec
    order: OrderSpec
    side: Side
    function: str
    xs: t.Tuple[float, ...]
    expected: t.Callable[[float], float] = dataclasses.field(compare=False)
    tolerance: float
    citation: str

    def __post_init__(self) -> None:
        if not self.tolerance > 0.0:
            raise InvalidParameterError(
                f"tolerance must be positive, got {self.tolerance!r}"
            )

    def expected_values(self) -> t.List[float]:
        return [self.expected(x) for x in self.xs]


def standard_psis() -> t.List[t.Tuple[str, PsiSpec]]:
    """The transforms every suite sweeps over."""
    return [
        ("identity", make_preset("identity", (), (0.0, 1.0))),
        ("log", make_preset("log", (), (1.0, math.e))),
        ("pow2", make_preset("power", (2.0,), (0.0, 1.0))),
    ]


def interior_grid(psi: PsiSpec) -> t.Tuple[float, ...]:
    return tuple(psi.a + (psi.b - psi.a) * f for f in GRID_FRACTIONS)


def power_text(psi: PsiSpec, side: Side, exponent: float) -> str:
    """Expression text of Delta^exponent measured from the `side` anchor."""
    lo, hi = psi.s_bounds
    body = expr.to_text(psi.psi)
    if side is Side.LEFT:
        base = f"({body}) - ({lo!r})"
    else:
        base = f"({hi!r}) - ({body})"
    return f"({base})^({exponent!r})"


def _power_cases() -> t.List[OracleCase]:
    cases: t.List[OracleCase] = []
    for label, psi in standard_psis():
        xs = interior_grid(psi)
        for alpha in POWER_ALPHAS:
            for delta in (1.0, 2.0):
                for side in (Side.LEFT, Side.RIGHT):
                    cases.append(OracleCase(
                        "power",
                        f"integral-{label}-a{alpha}-d{delta:g}-{side.value}",
                        OracleKind.INTEGRAL, psi, OrderSpec(alpha), side,
                        power_text(psi, side, delta - 1.0), xs,
                        _bind(power_integral, psi, alpha, delta, side),
                        POWER_TOLERANCE,
                        "power law for psi-fractional integrals",
                    ))
            for beta in POWER_BETAS:
                order = OrderSpec(alpha, beta)
                for delta in (order.n + 1.0, order.n + 2.0):
                    cases.append(OracleCase(
                        "power",
                        f"hilfer-{label}-a{alpha}-b{beta}-d{delta:g}",
                        OracleKind.HILFER, psi, order, Side.LEFT,
                        power_text(psi, Side.LEFT, delta - 1.0), xs,
                        _bind(power_derivative, psi, order, delta, Side.LEFT),
                        POWER_TOLERANCE,
                        "power law for Hilfer derivatives",
                    ))
    return cases


def _ml_cases() -> t.List[OracleCase]:
    cases: t.List[OracleCase] = []
    for label, psi in standard_psis()[:2]:
        lo = psi.s_bounds[0]
        body = expr.to_text(psi.psi)
        for alpha in EIGEN_ALPHAS:
            for lam in EIGEN_LAMBDAS:
                function = (
                    f"mlf({alpha!r}, {lam!r} * (({body}) - ({lo!r}))^{alpha!r})"
                )
                cases.append(OracleCase(
                    "ml", f"eigen-{label}-a{alpha}-l{lam}",
                    OracleKind.HILFER, psi, OrderSpec(alpha, 1.0), Side.LEFT,
                    function, interior_grid(psi),
                    _bind(ml_eigen, psi, alpha, lam),
                    EIGEN_TOLERANCE,
                    "Mittag-Leffler eigenfunction of the Caputo-type derivative",
                ))
    return cases


def _bind(func: t.Callable[..., float], *args: t.Any) -> t.Callable[[float], float]:
    def expected(x: float) -> float:
        return func(*args, x)
    return expected


def builtin_cases() -> t.List[OracleCase]:
    """Registry consumed by the power and ml verification suites."""
    return _power_cases() + _ml_cases()
