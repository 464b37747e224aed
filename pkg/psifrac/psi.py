"""Increasing transforms psi with their derivative and inverse.

A `PsiSpec` fixes the interval [a, b] and the map psi on it. Presets cover
the identity, the logarithm and the powers t^rho; any other transform is
parsed from an expression and differentiated symbolically. `validate`
samples psi' at Chebyshev points and `invert` falls back to bisection when
no exact inverse is known.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
import typing as t

import numpy as np

from . import expr
from .error import (
    DomainError,
    InvalidDomainError,
    InvalidParameterError,
    OutOfRangeError,
)
from .expr import ExprNode


__all__ = [
    "PsiKind",
    "PsiSpec",
    "ValidationReport",
    "Violation",
    "from_selector",
    "invert",
    "make_custom",
    "make_preset",
    "validate",
]


logger = logging.getLogger(__name__)

Real_t = t.Union[float, np.ndarray]
Inverse_t = t.Callable[[np.ndarray], np.ndarray]

DEFAULT_VALIDATION_SAMPLES = 257
MONOTONE_RELATIVE_FLOOR = 1e-12
DERIVATIVE_RTOL = 1e-6
INVERSE_RTOL = 1e-10
INVERT_RTOL = 1e-12
_BISECTION_STEPS = 60
_NEWTON_STEPS = 3


class PsiKind(enum.Enum):

    IDENTITY = "identity"
    LOG = "log"
    POWER = "power"
    CUSTOM = "custom"


@dataclasses.dataclass(frozen=True)
class PsiSpec:
    """The transform psi on a closed interval.

    `psi` and `dpsi` are expression trees for every kind, so operators
    can always differentiate through psi; presets additionally carry an
    exact inverse.
    """

    psi: ExprNode
    dpsi: ExprNode
    domain: t.Tuple[float, float]
    kind: PsiKind = PsiKind.CUSTOM
    params: t.Tuple[float, ...] = ()
    inv: t.Optional[Inverse_t] = dataclasses.field(
        default=None, compare=False, repr=False
    )

    @property
    def a(self) -> float:
        return self.domain[0]

    @property
    def b(self) -> float:
        return self.domain[1]

    @property
    def s_bounds(self) -> t.Tuple[float, float]:
        """Images psi(a) and psi(b)."""
        return (
            t.cast(float, self.value(self.a)),
            t.cast(float, self.value(self.b)),
        )

    def value(self, x: Real_t) -> Real_t:
        return expr.evaluate(self.psi, x)

    def derivative(self, x: Real_t) -> Real_t:
        return expr.evaluate(self.dpsi, x)

    def inverse(self, y: Real_t) -> Real_t:
        return invert(self, y)

    def with_domain(self, a: float, b: float) -> PsiSpec:
        """Same transform on another interval."""
        if self.kind is PsiKind.CUSTOM:
            _check_interval((a, b))
            return dataclasses.replace(self, domain=(float(a), float(b)))
        return make_preset(self.kind, self.params, (a, b))

    def describe(self) -> str:
        if self.kind is PsiKind.IDENTITY:
            return "identity"
        if self.kind is PsiKind.LOG:
            return "log"
        if self.kind is PsiKind.POWER:
            return f"pow:{self.params[0]!r}"
        return f"expr:{expr.to_text(self.psi)}"


def _check_interval(domain: t.Sequence[float]) -> t.Tuple[float, float]:
    if len(domain) != 2:
        raise InvalidDomainError("domain must be a pair (a, b)")
    a, b = float(domain[0]), float(domain[1])
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise InvalidDomainError(f"invalid interval [{a!r}, {b!r}]")
    return a, b


def _power_inverse(rho: float) -> Inverse_t:
    def inverse(y: np.ndarray) -> np.ndarray:
        return np.power(np.maximum(y, 0.0), 1.0 / rho)
    return inverse


def _identity_inverse(y: np.ndarray) -> np.ndarray:
    return np.asarray(y, dtype=float)


def make_preset(
    kind: t.Union[PsiKind, str],
    params: t.Sequence[float],
    domain: t.Sequence[float],
) -> PsiSpec:
    """Build one of the preset transforms.

    Args:
        kind: `identity`, `log` or `power` (alias `pow`).
        params: `[rho]` for the power preset, empty otherwise.
        domain: Interval `(a, b)`.

    Returns:
        Preset with exact derivative and inverse.

    Raises:
        InvalidDomainError: Raised if the interval is empty or violates
            the preset's domain (`a > 0` for log, `a >= 0` for power).
        InvalidParameterError: Raised if rho is not positive.
    """
    if isinstance(kind, str):
        kind = PsiKind.POWER if kind == "pow" else PsiKind(kind)
    a, b = _check_interval(domain)
    params = tuple(float(p) for p in params)

    if kind is PsiKind.IDENTITY:
        return PsiSpec(
            expr.parse("x"), expr.constant(1.0), (a, b), kind, (),
            _identity_inverse,
        )

    if kind is PsiKind.LOG:
        if a <= 0.0:
            raise InvalidDomainError(f"log preset requires a > 0, got {a!r}")
        return PsiSpec(
            expr.parse("ln(x)"), expr.parse("1/x"), (a, b), kind, (), np.exp,
        )

    if kind is PsiKind.POWER:
        if len(params) != 1:
            raise InvalidParameterError("power preset takes one parameter")
        rho = params[0]
        if not (math.isfinite(rho) and rho > 0.0):
            raise InvalidParameterError(
                f"power preset requires rho > 0, got {rho!r}"
            )
        if a < 0.0:
            raise InvalidDomainError(
                f"power preset requires a >= 0, got {a!r}"
            )
        psi = expr.parse(f"x^{rho!r}")
        dpsi = expr.parse(f"{rho!r}*x^({rho - 1.0!r})")
        return PsiSpec(psi, dpsi, (a, b), kind, (rho,), _power_inverse(rho))

    raise InvalidParameterError("custom transforms are built by make_custom")


def make_custom(
    psi: t.Union[ExprNode, str],
    domain: t.Sequence[float],
    inverse: t.Optional[Inverse_t] = None,
) -> PsiSpec:
    """Build a user transform; its derivative is taken symbolically.

    Raises:
        NonDifferentiableError: Raised if the expression cannot be
            differentiated.
    """
    node = expr.parse(psi) if isinstance(psi, str) else psi
    return PsiSpec(
        node, expr.differentiate(node), _check_interval(domain),
        PsiKind.CUSTOM, (), inverse,
    )


def from_selector(text: str, domain: t.Sequence[float]) -> PsiSpec:
    """Parse a selector `identity|log|pow:<rho>|expr:<text>`."""
    if text in ("identity", "log"):
        return make_preset(text, (), domain)
    if text.startswith("pow:"):
        try:
            rho = float(text[4:])
        except ValueError:
            raise InvalidParameterError(f"invalid power in selector {text!r}")
        return make_preset(PsiKind.POWER, (rho,), domain)
    if text.startswith("expr:"):
        return make_custom(text[5:], domain)
    raise InvalidParameterError(
        f"unknown psi selector {text!r}; expected identity, log, pow:<rho> "
        "or expr:<text>"
    )


class Violation(t.NamedTuple):

    check: str
    x: float
    detail: str


class ValidationReport(t.NamedTuple):
    """Outcome of `validate`: one entry per failed check."""

    passed: bool
    violations: t.Tuple[Violation, ...]


def _chebyshev_points(a: float, b: float, count: int) -> np.ndarray:
    k = np.arange(count)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * count))
    return np.sort(0.5 * (a + b) + 0.5 * (b - a) * nodes)


def validate(
    spec: PsiSpec,
    samples: int = DEFAULT_VALIDATION_SAMPLES,
) -> ValidationReport:
    """Certify monotonicity, derivative and inverse by sampling.

    Samples are first-kind Chebyshev points, which never touch the
    endpoints.
    """
    xs = _chebyshev_points(spec.a, spec.b, samples)
    violations: t.List[Violation] = []

    try:
        d = np.asarray(spec.derivative(xs), dtype=float)
        values = np.asarray(spec.value(xs), dtype=float)
    except DomainError as err:
        violation = Violation("evaluation", float("nan"), str(err))
        return ValidationReport(False, (violation,))

    finite = np.isfinite(d)
    scale = np.max(np.abs(d[finite])) if np.any(finite) else 0.0
    bad = ~finite | (d <= MONOTONE_RELATIVE_FLOOR * scale)
    if np.any(bad):
        i = int(np.argmax(bad))
        violations.append(Violation(
            "monotone", float(xs[i]), f"dpsi={d[i]!r} is not positive",
        ))

    distance = np.minimum(xs - spec.a, spec.b - xs)
    h = np.minimum(1e-5 * (spec.b - spec.a), 1e-3 * distance)
    central = (spec.value(xs + h) - spec.value(xs - h)) / (2.0 * h)
    mismatch = np.abs(central - d) > DERIVATIVE_RTOL * np.maximum(
        np.abs(d), np.finfo(float).tiny
    )
    mismatch &= finite
    if np.any(mismatch):
        i = int(np.argmax(mismatch))
        violations.append(Violation(
            "derivative", float(xs[i]),
            f"dpsi={d[i]!r} but central difference gives {central[i]!r}",
        ))

    if spec.inv is not None:
        back = np.asarray(spec.inv(values), dtype=float)
        off = np.abs(back - xs) > INVERSE_RTOL * (1.0 + np.abs(xs))
        if np.any(off):
            i = int(np.argmax(off))
            violations.append(Violation(
                "inverse", float(xs[i]), f"inv(psi(x))={back[i]!r}",
            ))

    for violation in violations:
        logger.debug("psi %s failed %s", spec.describe(), violation)
    return ValidationReport(not violations, tuple(violations))


def _bisect(spec: PsiSpec, y: np.ndarray) -> np.ndarray:
    lo = np.full(y.shape, spec.a)
    hi = np.full(y.shape, spec.b)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = spec.value(mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)

    x = 0.5 * (lo + hi)
    for _ in range(_NEWTON_STEPS):
        with np.errstate(all="ignore"):
            step = (spec.value(x) - y) / spec.derivative(x)
        candidate = x - step
        inside = np.isfinite(candidate) & (candidate >= lo) & (candidate <= hi)
        x = np.where(inside, candidate, x)
    return x


def invert(spec: PsiSpec, y: Real_t) -> Real_t:
    """Solve psi(x) = y on the domain.

    Uses the exact inverse when the spec has one, otherwise monotone
    bisection refined by Newton steps.

    Raises:
        OutOfRangeError: Raised if `y` lies outside [psi(a), psi(b)].
    """
    arr = np.asarray(y, dtype=float)
    lo, hi = spec.s_bounds
    slack = INVERT_RTOL * (1.0 + np.abs(arr))
    outside = (arr < lo - slack) | (arr > hi + slack) | np.isnan(arr)
    if np.any(outside):
        bad = float(np.broadcast_to(arr, outside.shape)[outside].flat[0])
        raise OutOfRangeError(
            f"{bad!r} is outside the range [{lo!r}, {hi!r}] of psi"
        )
    arr = np.clip(arr, lo, hi)

    if spec.inv is not None:
        x = np.clip(np.asarray(spec.inv(arr), dtype=float), spec.a, spec.b)
    else:
        x = _bisect(spec, np.atleast_1d(arr)).reshape(arr.shape)

    if np.ndim(y) == 0:
        return float(x)
    return x
