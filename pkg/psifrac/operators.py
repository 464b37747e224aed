"""psi-fractional integrals and derivatives on a finite interval.

Every operator is built as an *image*: an `Operand` describing its output
as a function. The input is split at the anchor endpoint into its
psi-Taylor polynomial, its explicit power terms and a remainder that
vanishes there. Polynomial and power parts are mapped in closed form; the
remainder alone goes through the product quadrature of `quad`. Images can
be evaluated at points or fed into further operators, which is how
compositions (semigroup, inversion, left inverse) are computed.

Derivatives of non-integer order use the Caputo integral after an
integration by parts, so only f^[n-1] is sampled:

    CD^a G'(S) = [G(S) delta^-a + a * int |S-s|^-a (G(S)-G(s))/|S-s| ds]
                 / Gamma(1-a),   0 < a < 1, G(anchor) = 0.

Riemann-Liouville and Hilfer derivatives share that stage and differ only
in how the polynomial and power parts are mapped.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
import typing as t

import numpy as np

from .error import (
    DomainError,
    ExtrapolationError,
    InnerSingularityError,
    InvalidParameterError,
)
from .operand import (
    Function_t,
    Operand,
    PowerTerm,
    RegularPart,
    Side,
    Stage,
    coerce,
    distance,
    endpoint_limit,
    require_interior_step,
)
from .psi import PsiSpec
from .quad import (
    DEGENERATE_WIDTH,
    BatchResult,
    EvalResult,
    QuadConfig,
    integrate_batch,
)
from .specialfn import lgamma, rgamma


__all__ = [
    "HilferMode",
    "OrderSpec",
    "Side",
    "caputo_derivative",
    "caputo_image",
    "derivative_image",
    "evaluate_grid",
    "frac_integral",
    "hilfer_derivative",
    "hilfer_image",
    "integral_image",
    "inversion_residual",
    "norm_c_gamma",
    "norm_cn_gamma",
    "psi_derivative_op",
    "remark_h1_form",
    "rl_derivative",
    "rl_image",
]


logger = logging.getLogger(__name__)

INTEGRAL_TAYLOR_TERMS = 2
DERIVATIVE_EXTRA_TERMS = 2
POINT_SLACK = 1e-12
NORM_SAMPLES = 201
_ZERO_ORDER = 1e-14

PowerFactor_t = t.Callable[[float], float]


class HilferMode(enum.Enum):
    """Evaluation route of Hilfer derivatives of type 0 < beta < 1.

    SEMIGROUP folds I^(gamma-alpha) I^(n-gamma) into one integral of order
    n - alpha; NESTED composes I^(gamma-alpha) with the Riemann-Liouville
    derivative of order gamma literally.
    """

    SEMIGROUP = "semigroup"
    NESTED = "nested"


def _is_integer(value: float) -> bool:
    return value == math.floor(value)


def order_n(alpha: float) -> int:
    """n with n - 1 < alpha <= n."""
    return int(alpha) if _is_integer(alpha) else math.floor(alpha) + 1


@dataclasses.dataclass(frozen=True)
class OrderSpec:
    """Order alpha and type beta of a derivative.

    Raises:
        InvalidParameterError: Raised if alpha is not positive or beta is
            outside [0, 1].
    """

    alpha: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and self.alpha > 0.0):
            raise InvalidParameterError(
                f"order alpha must be positive, got {self.alpha!r}"
            )
        if not (0.0 <= self.beta <= 1.0):
            raise InvalidParameterError(
                f"type beta must lie in [0, 1], got {self.beta!r}"
            )

    @property
    def is_integer(self) -> bool:
        return _is_integer(self.alpha)

    @property
    def n(self) -> int:
        return order_n(self.alpha)

    @property
    def gamma_h(self) -> float:
        """Inner order gamma = alpha + beta (n - alpha)."""
        return self.alpha + self.beta * (self.n - self.alpha)

    @property
    def mu(self) -> float:
        return self.n * (1.0 - self.beta) + self.beta * self.alpha


def _gamma_ratio(p: float, q: float) -> float:
    # Gamma(p) / Gamma(q) for p > 0, zero when q is a pole
    r = rgamma(q)
    if r == 0.0:
        return 0.0
    return math.copysign(math.exp(lgamma(p) - lgamma(q)), r)


# --------------------------------------------------------------------------
# Closed-form maps of delta^mu; each returns the factor of delta^(mu - order)

def _integral_factor(alpha: float, error: t.Type[DomainError]) -> PowerFactor_t:
    def factor(mu: float) -> float:
        if mu <= -1.0:
            raise error(
                "frac_integral", mu, "power term is not integrable at the endpoint"
            )
        return _gamma_ratio(mu + 1.0, mu + 1.0 + alpha)
    return factor


def _caputo_factor(alpha: float) -> PowerFactor_t:
    n = order_n(alpha)

    def factor(mu: float) -> float:
        if _is_integer(mu) and 0.0 <= mu < n:
            return 0.0
        if mu > n - 1:
            return _gamma_ratio(mu + 1.0, mu + 1.0 - alpha)
        raise DomainError(
            "caputo_derivative", mu,
            f"power term has no integrable psi-derivative of order {n}",
        )
    return factor


def _rl_factor(alpha: float) -> PowerFactor_t:
    def factor(mu: float) -> float:
        if mu <= -1.0:
            raise DomainError(
                "rl_derivative", mu, "power term is not integrable at the endpoint"
            )
        return _gamma_ratio(mu + 1.0, mu + 1.0 - alpha)
    return factor


def _hilfer_factor(alpha: float, gamma_h: float) -> PowerFactor_t:
    def factor(mu: float) -> float:
        if mu <= -1.0:
            raise DomainError(
                "hilfer_derivative", mu,
                "power term is not integrable at the endpoint",
            )
        if rgamma(mu + 1.0 - gamma_h) == 0.0:
            return 0.0
        if mu - gamma_h <= -1.0:
            raise InnerSingularityError(
                "hilfer_derivative", mu,
                f"inner derivative of order {gamma_h!r} is not integrable",
            )
        return _gamma_ratio(mu + 1.0, mu + 1.0 - alpha)
    return factor


def _mapped(term: PowerTerm, shift: float, factor: PowerFactor_t) -> t.List[PowerTerm]:
    k = factor(term.exponent)
    if k == 0.0:
        return []
    return [PowerTerm(term.coef * k, term.exponent + shift, term.side)]


def _taylor_terms(coefs: t.Sequence[float], side: Side) -> t.List[PowerTerm]:
    return [
        PowerTerm(c / math.factorial(j), float(j), side)
        for j, c in enumerate(coefs) if c
    ]


def _split(op: Operand, side: Side, count: int) -> t.Tuple[t.List[float], float]:
    # Taylor coefficients and the order to which the remainder vanishes
    coefs = op.taylor(side, count)
    vanishing = op.vanishing_at(side)
    m = len(coefs)
    if m == count:
        return coefs, max(vanishing, float(count))
    return coefs, max(vanishing, float(m - 1), 0.0)


def _remainder(
    op: Operand,
    side: Side,
    coefs: t.Sequence[float],
    k: int,
) -> t.Callable[[np.ndarray], np.ndarray]:
    """k-th psi-derivative of the regular part minus its Taylor polynomial."""
    psi = op.psi

    def func(s: np.ndarray) -> np.ndarray:
        out = op.regular_derivative(k, s, side)
        d = distance(psi, side, s)
        for j in range(k, len(coefs)):
            if coefs[j]:
                out = out - coefs[j] * d ** (j - k) / math.factorial(j - k)
        return out
    return func


def _has_regular(op: Operand, side: Side) -> bool:
    return op.regular is not None or any(p.side is not side for p in op.powers)


def _bounds(psi: PsiSpec, side: Side, s: np.ndarray) -> t.Tuple[t.Any, t.Any]:
    lo, hi = psi.s_bounds
    if side is Side.LEFT:
        return lo, np.maximum(s, lo)
    return np.minimum(s, hi), hi


class _IntegralStage(Stage):
    """I^alpha of a remainder, by product quadrature at each point."""

    def __init__(
        self,
        psi: PsiSpec,
        alpha: float,
        side: Side,
        integrand: t.Callable[[np.ndarray], np.ndarray],
        config: QuadConfig,
    ) -> None:
        self._psi = psi
        self._alpha = alpha
        self._side = side
        self._integrand = integrand
        self._config = config

    def evaluate(self, s):
        s = np.asarray(s, dtype=float).ravel()
        lower, upper = _bounds(self._psi, self._side, s)
        batch = integrate_batch(
            lambda sm, _: self._integrand(sm), lower, upper, self._alpha,
            self._side is Side.LEFT, self._config,
            removable_endpoints=True,
        )
        scale = rgamma(self._alpha)
        return batch._replace(
            values=batch.values * scale, err_est=batch.err_est * scale,
        )


class _CaputoStage(Stage):
    """Caputo derivative of order in (0, 1) of G', G vanishing at the anchor."""

    def __init__(
        self,
        psi: PsiSpec,
        order: float,
        side: Side,
        g: t.Callable[[np.ndarray], np.ndarray],
        config: QuadConfig,
    ) -> None:
        self._psi = psi
        self._order = order
        self._side = side
        self._g = g
        self._config = config

    def evaluate(self, s):
        s = np.asarray(s, dtype=float).ravel()
        g = self._g
        order = self._order
        lower, upper = _bounds(self._psi, self._side, s)

        def integrand(sm: np.ndarray, singular: np.ndarray) -> np.ndarray:
            return (g(singular) - g(sm)) / np.abs(singular - sm)

        batch = integrate_batch(
            integrand, lower, upper, 1.0 - order, self._side is Side.LEFT,
            self._config, removable_endpoints=True,
        )
        delta = distance(self._psi, self._side, s)
        inside = delta >= DEGENERATE_WIDTH
        boundary = np.zeros(s.shape)
        if np.any(inside):
            boundary[inside] = g(s[inside]) * delta[inside] ** -order
        scale = rgamma(1.0 - order)
        values = np.where(inside, (boundary + order * batch.values) * scale, 0.0)
        return BatchResult(
            values, order * batch.err_est * scale, batch.panels_used,
            batch.notes,
        )


class _DerivedPart(RegularPart):
    """n-fold psi-derivative of another regular part."""

    def __init__(self, base: RegularPart, n: int, side: Side) -> None:
        self._base = base
        self._n = n
        self._sign = side.sign ** n
        self.needs_x = base.needs_x
        self.err_floor = base.err_floor

    def derivative(self, k, s, x):
        return self._sign * self._base.derivative(self._n + k, s, x)


# --------------------------------------------------------------------------
# Images

def integral_image(
    psi: PsiSpec,
    alpha: float,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig] = None,
    error: t.Type[DomainError] = DomainError,
) -> Operand:
    """I^alpha f as an operand.

    Raises:
        DomainError: Raised (as `error`) if a power term of f is not
            integrable at the anchor.
    """
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise InvalidParameterError(f"order alpha must be positive, got {alpha!r}")
    config = config or QuadConfig()
    op = coerce(f, psi, config)
    factor = _integral_factor(alpha, error)

    coefs, vanishing = _split(op, side, INTEGRAL_TAYLOR_TERMS)
    powers: t.List[PowerTerm] = []
    for term in _taylor_terms(coefs, side) + list(op.native_powers(side)):
        powers += _mapped(term, alpha, factor)

    stage = None
    if _has_regular(op, side):
        stage = _IntegralStage(
            psi, alpha, side, _remainder(op, side, coefs, 0), config
        )
    return Operand(psi, stage, tuple(powers), side, alpha + vanishing, op.notes)


def derivative_image(
    psi: PsiSpec,
    n: int,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig] = None,
) -> Operand:
    """n-fold psi-derivative (1/psi' d/dt)^n, negated per order on the right."""
    op = coerce(f, psi, config)
    regular = _DerivedPart(op.regular, n, side) if op.regular else None
    powers = tuple(
        d for d in (p.derivative(n, side) for p in op.powers) if d.coef
    )
    vanishing = max(op.vanishing - n, 0.0)
    return Operand(psi, regular, powers, op.anchor, vanishing, op.notes)


def _fractional_derivative_image(
    psi: PsiSpec,
    alpha: float,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig],
    factor: PowerFactor_t,
    name: str,
) -> Operand:
    config = config or QuadConfig()
    n = order_n(alpha)
    op = coerce(f, psi, config)

    coefs, vanishing = _split(op, side, n + DERIVATIVE_EXTRA_TERMS)
    if len(coefs) < n:
        raise DomainError(
            name, None,
            f"needs {n} psi-derivative(s) at the endpoint, found {len(coefs)}",
        )
    powers: t.List[PowerTerm] = []
    for term in _taylor_terms(coefs, side) + list(op.native_powers(side)):
        powers += _mapped(term, -alpha, factor)

    stage = None
    if _has_regular(op, side):
        stage = _CaputoStage(
            psi, alpha - (n - 1), side, _remainder(op, side, coefs, n - 1),
            config,
        )
    return Operand(
        psi, stage, tuple(powers), side, max(vanishing - alpha, 0.0), op.notes,
    )


def caputo_image(
    psi: PsiSpec,
    alpha: float,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig] = None,
) -> Operand:
    if _is_integer(alpha):
        return derivative_image(psi, int(alpha), side, f, config)
    return _fractional_derivative_image(
        psi, alpha, side, f, config, _caputo_factor(alpha), "caputo_derivative"
    )


def rl_image(
    psi: PsiSpec,
    alpha: float,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig] = None,
) -> Operand:
    """Riemann-Liouville derivative: the Caputo stage plus the boundary sum
    f^[k](anchor) delta^(k-alpha) / Gamma(k+1-alpha) over the Taylor terms.
    """
    if _is_integer(alpha):
        return derivative_image(psi, int(alpha), side, f, config)
    return _fractional_derivative_image(
        psi, alpha, side, f, config, _rl_factor(alpha), "rl_derivative"
    )


def hilfer_image(
    psi: PsiSpec,
    order: OrderSpec,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig] = None,
    mode: HilferMode = HilferMode.SEMIGROUP,
) -> Operand:
    """Hilfer derivative of order alpha and type beta.

    beta = 0 and beta = 1 dispatch to the Riemann-Liouville and Caputo
    images, and integer orders to the psi-derivative.

    Raises:
        InnerSingularityError: Raised if a boundary term of the inner
            derivative of order gamma is not integrable (f with nonzero
            low-order data at the anchor and gamma > 1).
    """
    if order.is_integer:
        return derivative_image(psi, order.n, side, f, config)
    if order.beta == 0.0:
        return rl_image(psi, order.alpha, side, f, config)
    if order.beta == 1.0:
        return caputo_image(psi, order.alpha, side, f, config)

    if mode is HilferMode.NESTED:
        inner = rl_image(psi, order.gamma_h, side, f, config)
        return integral_image(
            psi, order.gamma_h - order.alpha, side, inner, config,
            error=InnerSingularityError,
        )
    return _fractional_derivative_image(
        psi, order.alpha, side, f, config,
        _hilfer_factor(order.alpha, order.gamma_h), "hilfer_derivative",
    )


def evaluate_grid(image: Operand, xs: t.Sequence[float]) -> t.List[EvalResult]:
    batch = image.evaluate(np.asarray(xs, dtype=float))
    return [batch.row(i) for i in range(len(batch.values))]


# --------------------------------------------------------------------------
# Point evaluations

def _point(psi: PsiSpec, x: float, name: str) -> float:
    slack = POINT_SLACK * (psi.b - psi.a)
    if not (psi.a - slack <= x <= psi.b + slack):
        raise DomainError(name, x, f"outside [{psi.a!r}, {psi.b!r}]")
    return min(max(float(x), psi.a), psi.b)


def _at(image: Operand, x: float) -> EvalResult:
    return image.evaluate(np.array([x])).row(0)


def frac_integral(
    psi: PsiSpec,
    alpha: float,
    side: Side,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
) -> EvalResult:
    """psi-fractional integral of order alpha at x.

    Args:
        psi: Transform and interval [a, b].
        alpha: Order, positive.
        side: LEFT integrates over [a, x], RIGHT over [x, b].
        f: Function of t (expression, text, constant, callable or operand).
        x: Evaluation point in [a, b].
        config: Quadrature controls.

    Returns:
        Value with error estimate; 0 at the anchor endpoint.

    Raises:
        DomainError: Raised if x is outside [a, b].
    """
    x = _point(psi, x, "frac_integral")
    return _at(integral_image(psi, alpha, side, f, config), x)


def psi_derivative_op(
    psi: PsiSpec,
    n: int,
    f: Function_t,
    x: float,
    side: Side = Side.LEFT,
) -> float:
    """(1/psi' d/dt)^n f at x (right side: (-1/psi' d/dt)^n).

    Expressions are differentiated symbolically; callables by nested
    central differences.

    Raises:
        NonDifferentiableError: Raised by symbolic differentiation.
        StepUnderflowError: Raised if a difference step would leave [a, b].
    """
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"derivative order must be >= 1, got {n!r}")
    x = _point(psi, x, "psi_derivative_op")
    op = coerce(f, psi)
    if op.regular is not None:
        require_interior_step(op.regular, int(n), x)
    image = derivative_image(psi, int(n), side, op)
    return float(image.evaluate(np.array([x])).values[0])


def caputo_derivative(
    psi: PsiSpec,
    order: OrderSpec,
    side: Side,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
) -> EvalResult:
    """psi-Caputo derivative I^(n-alpha) f^[n]; beta is ignored."""
    x = _point(psi, x, "caputo_derivative")
    return _at(caputo_image(psi, order.alpha, side, f, config), x)


def rl_derivative(
    psi: PsiSpec,
    order: OrderSpec,
    side: Side,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
) -> EvalResult:
    """psi-Riemann-Liouville derivative; beta is ignored.

    At the anchor itself the boundary term of f(anchor) diverges; the
    result is then infinite and carries the `singular-at-endpoint` note.
    """
    x = _point(psi, x, "rl_derivative")
    return _at(rl_image(psi, order.alpha, side, f, config), x)


def hilfer_derivative(
    psi: PsiSpec,
    order: OrderSpec,
    side: Side,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
    mode: HilferMode = HilferMode.SEMIGROUP,
) -> EvalResult:
    x = _point(psi, x, "hilfer_derivative")
    return _at(hilfer_image(psi, order, side, f, config, mode), x)


def remark_h1_form(
    psi: PsiSpec,
    order: OrderSpec,
    side: Side,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
) -> EvalResult:
    """Hilfer derivative as CD^mu I^((1-beta)(n-alpha)) f with
    mu = n(1-beta) + beta*alpha.
    """
    x = _point(psi, x, "remark_h1_form")
    nu = (1.0 - order.beta) * (order.n - order.alpha)
    inner: Function_t = f
    if nu > _ZERO_ORDER:
        inner = integral_image(psi, nu, side, f, config)
    return _at(caputo_image(psi, order.mu, side, inner, config), x)


# --------------------------------------------------------------------------
# Inversion residual and weighted norms

def _generalized(
    psi: PsiSpec,
    rho: float,
    side: Side,
    f: Function_t,
    config: t.Optional[QuadConfig],
) -> Operand:
    # Riemann-Liouville operation of signed order: integral for rho < 0
    if abs(rho) < _ZERO_ORDER:
        return coerce(f, psi, config)
    if rho < 0.0:
        return integral_image(psi, -rho, side, f, config)
    return rl_image(psi, rho, side, f, config)


def _anchor_limit(image: Operand, side: Side) -> float:
    total = 0.0
    for term in image.native_powers(side):
        if abs(term.exponent) <= 1e-12:
            total += term.coef
        elif term.exponent < 0.0:
            raise ExtrapolationError(
                f"boundary term with exponent {term.exponent!r} diverges"
            )
    if isinstance(image.regular, Stage) and image.vanishing_at(side) <= 0.0:
        return total + endpoint_limit(
            lambda s: image.regular_derivative(0, s, side), image.psi, side,
        )
    coefs = image.taylor(side, 1)
    if not coefs:
        raise ExtrapolationError("endpoint value does not stabilize")
    return total + coefs[0]


def inversion_residual(
    psi: PsiSpec,
    order: OrderSpec,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
    side: Side = Side.LEFT,
) -> float:
    """Residual of I^alpha applied to the Hilfer derivative of f.

    The sum over k = 1..n of delta^(gamma-k) / Gamma(gamma-k+1) times the
    endpoint limit of f^[n-k] I^((1-beta)(n-alpha)) f, so that
    I^alpha HD^(alpha,beta) f = f - residual.

    Raises:
        ExtrapolationError: Raised if an endpoint limit does not stabilize.
    """
    x = _point(psi, x, "inversion_residual")
    n = order.n
    nu = (1.0 - order.beta) * (n - order.alpha)
    gamma_h = order.gamma_h
    delta = float(distance(psi, side, np.array([psi.value(x)]))[0])

    total = 0.0
    for k in range(1, n + 1):
        limit = _anchor_limit(_generalized(psi, n - k - nu, side, f, config), side)
        logger.debug("residual limit k=%d: %r", k, limit)
        if limit:
            total += delta ** (gamma_h - k) * rgamma(gamma_h - k + 1.0) * limit
    return total


def _norm_points(psi: PsiSpec, samples: int) -> np.ndarray:
    return np.linspace(psi.a, psi.b, samples + 1)[1:]


def norm_c_gamma(
    psi: PsiSpec,
    gamma: float,
    func: t.Callable[[np.ndarray], t.Any],
    samples: int = NORM_SAMPLES,
) -> float:
    """max |(psi(x) - psi(a))^gamma func(x)| over sampled x in (a, b]."""
    xs = _norm_points(psi, samples)
    weight = (np.asarray(psi.value(xs)) - psi.s_bounds[0]) ** gamma
    values = np.asarray(func(xs), dtype=float)
    return float(np.max(np.abs(weight * values)))


def norm_cn_gamma(
    psi: PsiSpec,
    order: OrderSpec,
    f: Function_t,
    samples: int = NORM_SAMPLES,
    config: t.Optional[QuadConfig] = None,
) -> float:
    """Sum of max |f^[k]| for k < n plus the C_gamma norm of f^[n]."""
    op = coerce(f, psi, config)
    xs = _norm_points(psi, samples)
    total = 0.0
    for k in range(order.n):
        values = derivative_image(psi, k, Side.LEFT, op)(xs) if k else op(xs)
        total += float(np.max(np.abs(values)))
    top = derivative_image(psi, order.n, Side.LEFT, op)
    return total + norm_c_gamma(psi, order.gamma_h, top, samples)
