"""Functions as the operators consume them.

Operators work in the variable s = psi(t), where the psi-derivative
(1/psi'(t)) d/dt becomes the plain derivative d/ds. An `Operand` is a
function of t on [a, b] written as a regular part plus explicit power
terms coef * delta^exponent, where delta = psi(t) - psi(a) for terms
anchored on the left and psi(b) - psi(t) for terms anchored on the right.
Power terms carry the endpoint singularities of weighted spaces in closed
form, so only regular parts are ever sampled.
"""

from __future__ import annotations

import abc
import dataclasses
import enum
import logging
import math
import typing as t

import numpy as np

from . import expr
from .error import (
    DomainError,
    ExtrapolationError,
    InvalidParameterError,
    NonDifferentiableError,
    StepUnderflowError,
)
from .expr import ExprNode
from .psi import PsiSpec
from .quad import NOTE_SINGULAR, BatchResult, QuadConfig, as_array_function


__all__ = [
    "CallablePart",
    "ExprPart",
    "Operand",
    "PowerTerm",
    "ProxyPart",
    "RegularPart",
    "Side",
    "Stage",
    "coerce",
    "distance",
    "endpoint_limit",
    "require_interior_step",
]


logger = logging.getLogger(__name__)

Function_t = t.Union[ExprNode, str, float, int, t.Callable[..., t.Any], "Operand"]

LIMIT_OFFSETS = (1e-3, 2e-3, 4e-3)
LIMIT_STABLE_RTOL = 1e-9
DIFFERENCE_STEP = 1e-4
_MIN_STEP_FRACTION = 1e-3


class Side(enum.Enum):
    """Side of a one-sided operator, and anchor of a power term."""

    LEFT = "left"
    RIGHT = "right"

    @property
    def sign(self) -> float:
        return 1.0 if self is Side.LEFT else -1.0

    @property
    def opposite(self) -> Side:
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


def anchor_s(psi: PsiSpec, side: Side) -> float:
    lo, hi = psi.s_bounds
    return lo if side is Side.LEFT else hi


def anchor_x(psi: PsiSpec, side: Side) -> float:
    return psi.a if side is Side.LEFT else psi.b


def distance(psi: PsiSpec, side: Side, s: np.ndarray) -> np.ndarray:
    """Distance in s from the anchor of `side`, never negative."""
    d = side.sign * (np.asarray(s, dtype=float) - anchor_s(psi, side))
    return np.maximum(d, 0.0)


@dataclasses.dataclass(frozen=True)
class PowerTerm:
    """coef * delta^exponent with delta measured from the `side` anchor."""

    coef: float
    exponent: float
    side: Side

    def value(self, psi: PsiSpec, s: np.ndarray) -> np.ndarray:
        d = distance(psi, self.side, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coef * np.power(d, self.exponent)

    def derivative(self, k: int, direction: Side) -> PowerTerm:
        """k-fold psi-derivative taken in `direction`."""
        coef = self.coef
        for i in range(k):
            coef *= self.exponent - i
        if direction is not self.side and k % 2:
            coef = -coef
        return PowerTerm(coef, self.exponent - k, self.side)


class RegularPart(abc.ABC):
    """Regular part of an operand as a function of s."""

    needs_x: bool = True
    err_floor: float = 0.0

    @abc.abstractmethod
    def derivative(
        self,
        k: int,
        s: np.ndarray,
        x: t.Optional[np.ndarray],
    ) -> np.ndarray:
        """k-th derivative in s, given x = psi^-1(s) when `needs_x`."""
        pass


class CallablePart(RegularPart):
    """Plain callable of t; derivatives by nested central differences.

    The step is h = (b - a) * 1e-4 per level, shrunk near the endpoints so
    all samples stay inside [a, b]. Points where the step would fall below
    a thousandth of h give NaN.
    """

    def __init__(self, func: t.Callable[..., t.Any], psi: PsiSpec) -> None:
        self._func = as_array_function(func)
        self._psi = psi
        self._h = DIFFERENCE_STEP * (psi.b - psi.a)

    def step(self, k: int, x: np.ndarray) -> np.ndarray:
        reach = np.minimum(x - self._psi.a, self._psi.b - x)
        h = np.minimum(self._h, reach / (k + 1))
        return np.where(h >= _MIN_STEP_FRACTION * self._h, h, np.nan)

    def _nested(self, k: int, x: np.ndarray, h: np.ndarray) -> np.ndarray:
        if k == 0:
            return self._func(x)
        forward = self._nested(k - 1, x + h, h)
        backward = self._nested(k - 1, x - h, h)
        return (forward - backward) / (2.0 * h * self._psi.derivative(x))

    def derivative(self, k, s, x):
        x = np.asarray(x, dtype=float)
        if k == 0:
            return self._func(x)
        h = self.step(k, x)
        safe = np.where(np.isfinite(h), x, 0.5 * (self._psi.a + self._psi.b))
        with np.errstate(all="ignore"):
            out = self._nested(k, safe, np.where(np.isfinite(h), h, 1.0))
        return np.where(np.isfinite(h), out, np.nan)


class ExprPart(RegularPart):
    """Expression tree in x; psi-derivatives are built symbolically."""

    def __init__(self, node: ExprNode, psi: PsiSpec) -> None:
        self.node = node
        self._psi = psi
        self._trees = [node]
        self._fallback: t.Optional[CallablePart] = None

    def _tree(self, k: int) -> t.Optional[ExprNode]:
        while len(self._trees) <= k and self._fallback is None:
            try:
                d = expr.differentiate(self._trees[-1])
            except NonDifferentiableError as err:
                logger.debug("falling back to differences: %s", err)
                self._fallback = CallablePart(
                    lambda x: expr.evaluate(self.node, x), self._psi
                )
                break
            self._trees.append(expr.quotient(d, self._psi.dpsi))
        return self._trees[k] if k < len(self._trees) else None

    def derivative(self, k, s, x):
        x = np.asarray(x, dtype=float)
        tree = self._tree(k)
        if tree is None:
            return t.cast(CallablePart, self._fallback).derivative(k, s, x)
        return np.broadcast_to(
            np.asarray(expr.evaluate(tree, x), dtype=float), x.shape
        )


class ProxyPart(RegularPart):
    """Chebyshev table in s of a quadrature-backed function."""

    needs_x = False

    def __init__(self, series: np.polynomial.Chebyshev, err_floor: float) -> None:
        self.series = series
        self.err_floor = err_floor
        self._derivatives = [series]

    def derivative(self, k, s, x):
        while len(self._derivatives) <= k:
            self._derivatives.append(self._derivatives[-1].deriv())
        return self._derivatives[k](np.asarray(s, dtype=float))


class Stage(RegularPart):
    """Regular part defined by a quadrature at every point."""

    needs_x = False

    @abc.abstractmethod
    def evaluate(self, s: np.ndarray) -> BatchResult:
        pass

    def derivative(self, k, s, x):
        if k:
            raise NonDifferentiableError(
                "quadrature stages are tabulated before differentiation"
            )
        s = np.asarray(s, dtype=float)
        return self.evaluate(s.ravel()).values.reshape(s.shape)


@dataclasses.dataclass(frozen=True)
class Operand:
    """A function on [a, b] as seen by the operators.

    Args:
        psi: Transform the function is bound to.
        regular: Regular part, `None` for zero.
        powers: Power terms added to the regular part.
        anchor: Endpoint at which `vanishing` is known.
        vanishing: The regular part is O(delta^vanishing) at `anchor`.
        notes: Warnings collected while building the operand.
    """

    psi: PsiSpec
    regular: t.Optional[RegularPart] = None
    powers: t.Tuple[PowerTerm, ...] = ()
    anchor: Side = Side.LEFT
    vanishing: float = 0.0
    notes: t.Tuple[str, ...] = ()

    def _x(self, s: np.ndarray) -> t.Optional[np.ndarray]:
        if self.regular is None or not self.regular.needs_x:
            return None
        return np.asarray(self.psi.inverse(s), dtype=float)

    def native_powers(self, side: Side) -> t.Tuple[PowerTerm, ...]:
        return tuple(p for p in self.powers if p.side is side)

    def regular_derivative(
        self,
        k: int,
        s: np.ndarray,
        side: Side,
    ) -> np.ndarray:
        """k-fold psi-derivative in `side` direction of the regular part.

        Power terms anchored on the opposite side are smooth at this side's
        anchor and count as regular.
        """
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        if self.regular is not None:
            out = out + side.sign ** k * self.regular.derivative(
                k, s, self._x(s)
            )
        for term in self.powers:
            if term.side is not side:
                out = out + term.derivative(k, side).value(self.psi, s)
        return out

    def vanishing_at(self, side: Side) -> float:
        return self.vanishing if side is self.anchor else 0.0

    def taylor(self, side: Side, count: int) -> t.List[float]:
        """psi-Taylor coefficients f^[j](anchor) of the regular part.

        Each coefficient is the exact value when it is finite, else the
        limit from inside. The list stops at the first coefficient that
        cannot be obtained.
        """
        vanishing = self.vanishing_at(side)
        edge = np.array([anchor_s(self.psi, side)])
        coefs: t.List[float] = []
        for j in range(count):
            if j < vanishing:
                coefs.append(sum(
                    float(term.derivative(j, side).value(self.psi, edge)[0])
                    for term in self.powers if term.side is not side
                ))
                continue
            if vanishing != math.floor(vanishing) and j > vanishing:
                break
            try:
                value = float(self.regular_derivative(j, edge, side)[0])
            except DomainError:
                value = math.nan
            if not math.isfinite(value):
                try:
                    value = endpoint_limit(
                        lambda s, j=j: self.regular_derivative(j, s, side),
                        self.psi, side,
                    )
                except ExtrapolationError as err:
                    logger.debug("taylor stops at order %d: %s", j, err)
                    break
            coefs.append(value)
        logger.debug("%d taylor coefficient(s) at the %s end", len(coefs),
                     side.value)
        return coefs

    def evaluate(self, xs: t.Union[float, t.Sequence[float], np.ndarray]) -> BatchResult:
        """Values at the points `xs` of [a, b] with error estimates."""
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        s = np.asarray(self.psi.value(xs), dtype=float).reshape(xs.shape)
        notes = self.notes
        panels = np.zeros(xs.shape, dtype=int)

        if isinstance(self.regular, Stage):
            batch = self.regular.evaluate(s)
            values = batch.values.copy()
            err = batch.err_est.copy()
            panels = batch.panels_used
            notes = notes + tuple(n for n in batch.notes if n not in notes)
        elif self.regular is not None:
            values = np.array(self.regular.derivative(0, s, self._x(s)), dtype=float)
            err = np.full(xs.shape, self.regular.err_floor)
        else:
            values = np.zeros(xs.shape)
            err = np.zeros(xs.shape)

        for term in self.powers:
            values = values + term.value(self.psi, s)

        if not np.all(np.isfinite(values)):
            logger.warning("operator value diverges at an endpoint")
            if NOTE_SINGULAR not in notes:
                notes = notes + (NOTE_SINGULAR,)
        return BatchResult(values, err, panels, notes)

    def __call__(self, x: t.Union[float, np.ndarray]) -> t.Union[float, np.ndarray]:
        values = self.evaluate(x).values
        return float(values[0]) if np.ndim(x) == 0 else values.reshape(np.shape(x))


def endpoint_limit(
    func: t.Callable[[np.ndarray], np.ndarray],
    psi: PsiSpec,
    side: Side,
) -> float:
    """Limit of `func(s)` at the anchor of `side`.

    `func` is sampled at x = a + (b - a) * {1e-3, 2e-3, 4e-3} (mirrored for
    the right side), and the nearest value is Richardson-extrapolated at
    the order the three samples exhibit.

    Raises:
        ExtrapolationError: Raised if the samples are not finite or their
            differences do not contract toward the endpoint.
    """
    offsets = np.array(LIMIT_OFFSETS) * (psi.b - psi.a)
    xs = psi.a + offsets if side is Side.LEFT else psi.b - offsets
    s = np.asarray(psi.value(xs), dtype=float)
    with np.errstate(all="ignore"):
        v1, v2, v4 = (float(v) for v in np.asarray(func(s), dtype=float))
    if not all(math.isfinite(v) for v in (v1, v2, v4)):
        raise ExtrapolationError("nonfinite samples near the endpoint")

    d_small = v2 - v1
    d_big = v4 - v2
    scale = max(abs(v1), abs(v2), abs(v4), 1.0)
    if max(abs(d_small), abs(d_big)) <= LIMIT_STABLE_RTOL * scale:
        return v1
    ratio = d_big / d_small if d_small else math.inf
    if not (math.isfinite(ratio) and ratio > 1.0):
        raise ExtrapolationError(
            f"samples {v1!r}, {v2!r}, {v4!r} do not approach a limit"
        )
    # value + C * h^p with 2^p = ratio
    return v1 - d_small / (ratio - 1.0)


def _tabulate(stage: Stage, psi: PsiSpec, degree: int) -> ProxyPart:
    lo, hi = psi.s_bounds
    errors: t.List[float] = []

    def sample(s: np.ndarray) -> np.ndarray:
        batch = stage.evaluate(s)
        errors.append(float(np.max(batch.err_est)))
        return batch.values

    series = np.polynomial.Chebyshev.interpolate(sample, degree, domain=[lo, hi])
    return ProxyPart(series, max(errors, default=0.0))


def coerce(
    f: Function_t,
    psi: PsiSpec,
    config: t.Optional[QuadConfig] = None,
) -> Operand:
    """Turn any accepted function form into an operand bound to `psi`.

    Accepts expression trees, expression text, constants, callables of t
    and operands. Quadrature-backed operands are tabulated as Chebyshev
    proxies of degree `config.proxy_degree` so they can be differentiated
    and resampled.

    Raises:
        InvalidParameterError: Raised if an operand is bound to another
            transform.
    """
    if isinstance(f, Operand):
        if f.psi != psi:
            raise InvalidParameterError(
                "operand is bound to a different psi or domain"
            )
        if isinstance(f.regular, Stage):
            degree = (config or QuadConfig()).proxy_degree
            logger.debug("tabulating stage with degree %d", degree)
            return dataclasses.replace(f, regular=_tabulate(f.regular, psi, degree))
        return f
    if isinstance(f, str):
        f = expr.parse(f)
    if isinstance(f, (int, float)):
        f = expr.constant(float(f))
    if isinstance(f, ExprNode):
        return Operand(psi, ExprPart(f, psi))
    if callable(f):
        return Operand(psi, CallablePart(f, psi))
    raise InvalidParameterError(f"unsupported function object {f!r}")


def require_interior_step(part: RegularPart, k: int, x: float) -> None:
    """Raise StepUnderflowError if `part` cannot difference k times at x."""
    if isinstance(part, CallablePart) and k:
        if not np.isfinite(part.step(k, np.array([x]))[0]):
            raise StepUnderflowError(
                f"difference step underflows at x={x!r} for order {k}"
            )
