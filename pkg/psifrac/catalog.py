"""Classical fractional operators as special cases of the psi-Hilfer family.

A preset names one classical operator and carries up to two pipelines,
one per kind (integral, derivative). A pipeline fixes the transform psi,
the type beta, the side and the multipliers, wraps the input if needed
and evaluates through `operators`. Operators defined on infinite
intervals are evaluated on windows of length L around x and report an
estimate of the neglected tail.
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
    CosineZeroError,
    DomainError,
    InvalidDomainError,
    InvalidParameterError,
    MissingParameterError,
    UnknownNameError,
)
from .expr import ExprNode
from .operand import Function_t, Operand, Side, coerce
from .operators import (
    OrderSpec,
    derivative_image,
    frac_integral,
    hilfer_derivative,
    order_n,
)
from .psi import PsiSpec, make_preset
from .quad import (
    DEGENERATE_WIDTH,
    NOTE_SINGULAR,
    EvalResult,
    QuadConfig,
    as_array_function,
    integrate_batch,
)
from .specialfn import prabhakar_kernel, rgamma


__all__ = [
    "CatalogPreset",
    "DomainPolicy",
    "Kind",
    "Pipeline",
    "PresetInfo",
    "Request",
    "apply",
    "list_presets",
    "names",
    "resolve",
]


logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 30.0
NOTE_TRUNCATION = "truncation-tail"
_COS_FLOOR = 1e-12


class Kind(enum.Enum):

    INTEGRAL = "integral"
    DERIVATIVE = "derivative"


class DomainPolicy(enum.Enum):
    """Where the interval of a pipeline comes from."""

    FINITE = "finite"
    """The caller's [a, b]."""

    ORIGIN = "origin"
    """a = 0, b from the caller or x."""

    BASE = "base"
    """a = c (preset parameter), b from the caller or x."""

    TRUNCATED = "truncated"
    """Windows [x - L, x] and [x, x + L] standing in for infinite limits."""

    PSI = "psi"
    """The caller's transform and its interval."""


@dataclasses.dataclass(frozen=True)
class Request:
    """Everything a pipeline needs for one evaluation."""

    alpha: float
    f: Function_t
    x: float
    domain: t.Tuple[float, float]
    params: t.Mapping[str, float]
    config: QuadConfig
    psi: t.Optional[PsiSpec] = None

    def transform(self, kind: str, *params: float) -> PsiSpec:
        return make_preset(kind, params, self.domain)

    def window(self, side: Side, scale: float = 1.0) -> PsiSpec:
        length = scale * self.params["L"]
        if side is Side.LEFT:
            return make_preset("identity", (), (self.x - length, self.x))
        return make_preset("identity", (), (self.x, self.x + length))


Run_t = t.Callable[[Request], EvalResult]


@dataclasses.dataclass(frozen=True)
class Pipeline:
    """One kind of a preset.

    Args:
        run: Evaluation of the pipeline.
        psi_kind: Transform tag shown in listings.
        beta_limit: Type of the Hilfer derivative used, `None` for
            integrals and for presets where beta is a parameter.
        citation: The reduction the pipeline realizes.
        side: `left`, `right` or `both`.
        required: Parameters the caller must supply.
        defaults: Optional parameters with their default values.
        domain: Policy for the interval.
    """

    run: Run_t
    psi_kind: str
    beta_limit: t.Optional[float]
    citation: str
    side: str = "left"
    required: t.Tuple[str, ...] = ()
    defaults: t.Tuple[t.Tuple[str, float], ...] = ()
    domain: DomainPolicy = DomainPolicy.FINITE

    @property
    def parameters(self) -> t.Tuple[str, ...]:
        return self.required + tuple(k for k, _ in self.defaults)


@dataclasses.dataclass(frozen=True)
class CatalogPreset:
    """A named classical operator with its bound parameters."""

    name: str
    integral: t.Optional[Pipeline] = None
    derivative: t.Optional[Pipeline] = None
    params: t.Mapping[str, float] = dataclasses.field(default_factory=dict)

    @property
    def kinds(self) -> t.Tuple[Kind, ...]:
        return tuple(
            k for k, p in (
                (Kind.INTEGRAL, self.integral),
                (Kind.DERIVATIVE, self.derivative),
            ) if p is not None
        )

    def pipeline(self, kind: t.Union[Kind, str]) -> Pipeline:
        kind = Kind(kind)
        found = self.integral if kind is Kind.INTEGRAL else self.derivative
        if found is None:
            raise InvalidParameterError(
                f"catalog operator '{self.name}' has no {kind.value} form"
            )
        return found

    @property
    def citation(self) -> str:
        return "; ".join(
            f"{k.value}: {self.pipeline(k).citation}" for k in self.kinds
        )


class PresetInfo(t.NamedTuple):
    """Row of `list_presets`."""

    name: str
    kinds: t.Tuple[str, ...]
    parameters: t.Tuple[str, ...]
    citation: str


# --------------------------------------------------------------------------
# Building blocks

def _as_node(f: Function_t) -> t.Optional[ExprNode]:
    if isinstance(f, str):
        return expr.parse(f)
    if isinstance(f, (int, float)):
        return expr.constant(float(f))
    if isinstance(f, ExprNode):
        return f
    return None


def _weighted(f: Function_t, exponent: float) -> Function_t:
    """x^exponent * f, kept symbolic for expressions."""
    if exponent == 0.0:
        return f
    node = _as_node(f)
    if node is not None:
        return expr.product(expr.parse(f"x^({exponent!r})"), node)
    func = as_array_function(t.cast(t.Callable[..., t.Any], f))
    return lambda x: np.power(x, exponent) * func(x)


def _shifted(f: Function_t, amount: float) -> Function_t:
    """f - amount."""
    node = _as_node(f)
    if node is not None:
        return expr.difference(node, expr.constant(amount))
    func = as_array_function(t.cast(t.Callable[..., t.Any], f))
    return lambda x: func(x) - amount


def _cos_half(alpha: float) -> float:
    c = math.cos(math.pi * alpha / 2.0)
    if abs(c) < _COS_FLOOR:
        raise CosineZeroError(
            f"cos(pi*alpha/2) vanishes at alpha={alpha!r}"
        )
    return c


def _feller_weights(alpha: float, theta: float) -> t.Tuple[float, float]:
    """(C_-, C_+) with C_-+ = sin((alpha -+ theta) pi / alpha) / sin(pi theta)."""
    if not 0.0 < theta < 1.0:
        raise InvalidParameterError(f"theta must lie in (0, 1), got {theta!r}")
    s = math.sin(math.pi * theta)
    c_minus = math.sin((alpha - theta) * math.pi / alpha) / s
    c_plus = math.sin((alpha + theta) * math.pi / alpha) / s
    return c_minus, c_plus


def _integral(
    psi: PsiSpec,
    req: Request,
    f: t.Optional[Function_t] = None,
    side: Side = Side.LEFT,
) -> EvalResult:
    return frac_integral(
        psi, req.alpha, side, req.f if f is None else f, req.x, req.config
    )


def _hilfer(
    psi: PsiSpec,
    req: Request,
    beta: float,
    f: t.Optional[Function_t] = None,
    side: Side = Side.LEFT,
) -> EvalResult:
    return hilfer_derivative(
        psi, OrderSpec(req.alpha, beta), side, req.f if f is None else f,
        req.x, req.config,
    )


def _check_point(psi: PsiSpec, x: float, name: str) -> None:
    if not psi.a <= x <= psi.b:
        raise DomainError(name, x, f"outside [{psi.a!r}, {psi.b!r}]")


# --------------------------------------------------------------------------
# Integrals

def _identity_integral(req: Request) -> EvalResult:
    return _integral(req.transform("identity"), req)


def _hadamard_integral(req: Request) -> EvalResult:
    return _integral(req.transform("log"), req)


def _erdelyi_kober_integral(req: Request) -> EvalResult:
    sigma, eta = req.params["sigma"], req.params["eta"]
    psi = req.transform("power", sigma)
    inner = _integral(psi, req, _weighted(req.f, sigma * eta))
    return inner.scale(req.x ** (-sigma * (req.alpha + eta)))


def _kober_integral(req: Request) -> EvalResult:
    eta = req.params["eta"]
    inner = _integral(req.transform("identity"), req, _weighted(req.f, eta))
    return inner.scale(req.x ** (-(req.alpha + eta)))


def _generalized_rho_integral(req: Request) -> EvalResult:
    rho, eta = req.params["rho"], req.params["eta"]
    kappa, beta = req.params["kappa"], req.params["beta"]
    psi = req.transform("power", rho)
    inner = _integral(psi, req, _weighted(req.f, rho * eta))
    return inner.scale(req.x ** kappa / rho ** beta)


def _katugampola_integral(req: Request) -> EvalResult:
    rho = req.params["rho"]
    return _integral(req.transform("power", rho), req).scale(rho ** -req.alpha)


def _prabhakar_integral(req: Request) -> EvalResult:
    # integral_a^x (x-t)^(alpha-1) E^gamma_(alpha,beta)(omega (x-t)^alpha) f(t) dt
    beta, gamma_p = req.params["beta"], req.params["gamma"]
    omega = req.params["omega"]
    psi = req.transform("identity")
    _check_point(psi, req.x, "prabhakar")
    op = coerce(req.f, psi, req.config)
    alpha = req.alpha

    def g(sm: np.ndarray, singular: np.ndarray) -> np.ndarray:
        u = np.maximum(singular - sm, 0.0)
        kernel = prabhakar_kernel(alpha, beta, gamma_p, omega * u ** alpha)
        return kernel * op(sm)

    return integrate_batch(
        g, psi.a, req.x, alpha, True, req.config, removable_endpoints=True,
    ).row(0)


def _riesz_integral(req: Request) -> EvalResult:
    c = _cos_half(req.alpha)
    plus = _integral(req.window(Side.LEFT), req)
    minus = _integral(req.window(Side.RIGHT), req, side=Side.RIGHT)
    return plus.plus(minus).scale(1.0 / (2.0 * c))


def _feller_integral(req: Request) -> EvalResult:
    c_minus, c_plus = _feller_weights(req.alpha, req.params["theta"])
    plus = _integral(req.window(Side.LEFT), req).scale(c_minus)
    minus = _integral(req.window(Side.RIGHT), req, side=Side.RIGHT)
    return plus.plus(minus.scale(c_plus))


def _liouville_integral(req: Request) -> EvalResult:
    return _integral(req.window(Side.LEFT), req)


def _weyl_integral(req: Request) -> EvalResult:
    return _integral(req.window(Side.RIGHT), req, side=Side.RIGHT)


# --------------------------------------------------------------------------
# Derivatives

def _given_psi(req: Request) -> PsiSpec:
    if req.psi is None:
        raise MissingParameterError("this operator needs a psi transform")
    return req.psi


def _psi_caputo(req: Request) -> EvalResult:
    return _hilfer(_given_psi(req), req, 1.0)


def _psi_rl(req: Request) -> EvalResult:
    return _hilfer(_given_psi(req), req, 0.0)


def _typed(psi_kind: str, beta: t.Optional[float], scaled: bool = False) -> Run_t:
    """Hilfer derivative on a preset transform, beta fixed or a parameter.

    With `scaled` the transform is x^rho and the result carries rho^alpha.
    """
    def run(req: Request) -> EvalResult:
        b = req.params["beta"] if beta is None else beta
        if scaled:
            rho = req.params["rho"]
            psi = req.transform(psi_kind, rho)
            return _hilfer(psi, req, b).scale(rho ** req.alpha)
        return _hilfer(req.transform(psi_kind), req, b)
    return run


def _jumarie(req: Request) -> EvalResult:
    psi = req.transform("identity")
    coefs = coerce(req.f, psi, req.config).taylor(Side.LEFT, 1)
    if not coefs:
        raise DomainError("jumarie", 0.0, "f(0) is not defined")
    return _hilfer(psi, req, 0.0, _shifted(req.f, coefs[0]))


def _erdelyi_kober_derivative(req: Request) -> EvalResult:
    sigma, eta = req.params["sigma"], req.params["eta"]
    psi = req.transform("power", sigma)
    inner = _hilfer(psi, req, 1.0, _weighted(req.f, sigma * (eta + req.alpha)))
    return inner.scale(req.x ** (-sigma * eta))


def _prabhakar_derivative(req: Request) -> EvalResult:
    # d^n/dx^n of the kernel integral with kernel
    # k(u) = u^(n-alpha-1) E^(-gamma)_(rho,n-alpha)(omega u^rho), moved
    # under the integral: boundary terms k^(m)(x-a) f^(n-1-m)(a) plus the
    # integral of k(x-t) f^(n)(t).
    rho, gamma_p = req.params["rho"], req.params["gamma"]
    omega = req.params["omega"]
    alpha = req.alpha
    if alpha == math.floor(alpha):
        raise InvalidParameterError(
            "the Prabhakar derivative needs a non-integer order"
        )
    n = order_n(alpha)
    b = n - alpha
    psi = req.transform("identity")
    _check_point(psi, req.x, "prabhakar")
    op = coerce(req.f, psi, req.config)
    coefs = op.taylor(Side.LEFT, n)
    if len(coefs) < n:
        raise DomainError(
            "prabhakar", psi.a, f"needs {n} derivative(s) at the endpoint"
        )

    u = req.x - psi.a
    boundary = 0.0
    notes: t.Tuple[str, ...] = ()
    if u < DEGENERATE_WIDTH:
        if any(coefs):
            boundary = math.inf
            notes = (NOTE_SINGULAR,)
    else:
        for m in range(n):
            c = coefs[n - 1 - m]
            if c:
                kernel = prabhakar_kernel(rho, b - m, -gamma_p, omega * u ** rho)
                boundary += c * u ** (b - 1.0 - m) * float(kernel)

    top = derivative_image(psi, n, Side.LEFT, op)

    def g(sm: np.ndarray, singular: np.ndarray) -> np.ndarray:
        w = np.maximum(singular - sm, 0.0)
        return prabhakar_kernel(rho, b, -gamma_p, omega * w ** rho) * top(sm)

    integral = integrate_batch(
        g, psi.a, req.x, b, True, req.config, removable_endpoints=True,
    ).row(0)
    result = integral.offset(boundary)
    return result._replace(notes=result.notes + notes)


def _riesz_derivative(req: Request) -> EvalResult:
    c = _cos_half(req.alpha)
    plus = _hilfer(req.window(Side.LEFT), req, 0.0)
    minus = _hilfer(req.window(Side.RIGHT), req, 0.0, side=Side.RIGHT)
    return plus.plus(minus).scale(-1.0 / (2.0 * c))


def _feller_derivative(req: Request) -> EvalResult:
    c_minus, c_plus = _feller_weights(req.alpha, req.params["theta"])
    plus = _hilfer(req.window(Side.LEFT), req, 0.0).scale(c_plus)
    minus = _hilfer(req.window(Side.RIGHT), req, 0.0, side=Side.RIGHT)
    return plus.plus(minus.scale(c_minus)).scale(-1.0)


def _liouville_derivative(beta: float) -> Run_t:
    def run(req: Request) -> EvalResult:
        return _hilfer(req.window(Side.LEFT), req, beta)
    return run


def _weyl_derivative(req: Request) -> EvalResult:
    return _hilfer(req.window(Side.RIGHT), req, 0.0, side=Side.RIGHT)


def _cassar_derivative(req: Request) -> EvalResult:
    # the truncation point N taken to L and 2L; the change bounds the limit
    near = _weyl_derivative(req)
    far = _hilfer(req.window(Side.RIGHT, 2.0), req, 0.0, side=Side.RIGHT)
    return far._replace(err_est=far.err_est + abs(far.value - near.value))


def _caputo_riesz(req: Request) -> EvalResult:
    c = _cos_half(req.alpha)
    psi = req.transform("identity")
    left = _hilfer(psi, req, 1.0)
    right = _hilfer(psi, req, 1.0, side=Side.RIGHT)
    sign = (-1.0) ** order_n(req.alpha)
    return left.plus(right.scale(sign)).scale(1.0 / (2.0 * c))


# --------------------------------------------------------------------------
# Registry

_TRUNCATION = (("L", DEFAULT_TRUNCATION),)
_REGISTRY: t.Dict[str, CatalogPreset] = {}


def _register(
    name: str,
    integral: t.Optional[Pipeline] = None,
    derivative: t.Optional[Pipeline] = None,
) -> None:
    _REGISTRY[name] = CatalogPreset(name, integral, derivative)


_register(
    "riemann_liouville",
    integral=Pipeline(_identity_integral, "identity", None, "psi(x) = x"),
    derivative=Pipeline(
        _typed("identity", 0.0), "identity", 0.0, "psi(x) = x, beta -> 0",
    ),
)
_register(
    "liouville",
    integral=Pipeline(
        _liouville_integral, "identity", None, "psi(x) = x, a = -inf",
        defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
    derivative=Pipeline(
        _liouville_derivative(0.0), "identity", 0.0,
        "psi(x) = x, a = -inf, beta -> 0",
        defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
)
_register(
    "riemann",
    integral=Pipeline(
        _identity_integral, "identity", None, "psi(x) = x, a = 0",
        domain=DomainPolicy.ORIGIN,
    ),
    derivative=Pipeline(
        _typed("identity", 0.0), "identity", 0.0, "psi(x) = x, a = 0, beta -> 0",
        domain=DomainPolicy.ORIGIN,
    ),
)
_register(
    "hadamard",
    integral=Pipeline(_hadamard_integral, "log", None, "psi(x) = ln x"),
    derivative=Pipeline(
        _typed("log", 0.0), "log", 0.0, "psi(x) = ln x, beta -> 0",
    ),
)
_register(
    "erdelyi_kober",
    integral=Pipeline(
        _erdelyi_kober_integral, "pow:sigma", None,
        "x^(-sigma(alpha+eta)) I^(alpha; x^sigma)(x^(sigma eta) f)",
        required=("sigma", "eta"),
    ),
    derivative=Pipeline(
        _erdelyi_kober_derivative, "pow:sigma", 1.0,
        "x^(-sigma eta) CD^(alpha; x^sigma)(x^(sigma(eta+alpha)) f)",
        required=("sigma", "eta"),
    ),
)
_register(
    "erdelyi",
    integral=Pipeline(
        _erdelyi_kober_integral, "pow:sigma", None,
        "x^(-sigma(alpha+eta)) I^(alpha; x^sigma)_0+(x^(sigma eta) f)",
        required=("sigma", "eta"), domain=DomainPolicy.ORIGIN,
    ),
)
_register(
    "kober",
    integral=Pipeline(
        _kober_integral, "identity", None,
        "x^(-(alpha+eta)) I^alpha_0+(x^eta f)",
        required=("eta",), domain=DomainPolicy.ORIGIN,
    ),
)
_register(
    "generalized_rho",
    integral=Pipeline(
        _generalized_rho_integral, "pow:rho", None,
        "x^kappa / rho^beta I^(alpha; x^rho)(x^(rho eta) f)",
        required=("rho", "eta", "kappa", "beta"),
    ),
)
_register(
    "katugampola",
    integral=Pipeline(
        _katugampola_integral, "pow:rho", None, "rho^(-alpha) I^(alpha; x^rho)",
        required=("rho",),
    ),
    derivative=Pipeline(
        _typed("power", 0.0, scaled=True), "pow:rho", 0.0,
        "rho^alpha HD^(alpha, 0; x^rho)", required=("rho",),
    ),
)
_register(
    "prabhakar",
    integral=Pipeline(
        _prabhakar_integral, "identity", None,
        "int_a^x (x-t)^(alpha-1) E^gamma_(alpha,beta)(omega (x-t)^alpha) "
        "f(t) dt",
        required=("beta", "gamma", "omega"),
    ),
    derivative=Pipeline(
        _prabhakar_derivative, "identity", None,
        "D^n int_a^x (x-t)^(n-alpha-1) E^(-gamma)_(rho,n-alpha)"
        "(omega (x-t)^rho) f(t) dt",
        required=("rho", "gamma", "omega"),
    ),
)
_register(
    "chen",
    integral=Pipeline(
        _identity_integral, "identity", None, "psi(x) = x, a = c",
        required=("c",), domain=DomainPolicy.BASE,
    ),
    derivative=Pipeline(
        _typed("identity", 0.0), "identity", 0.0, "psi(x) = x, a = c, beta -> 0",
        required=("c",), domain=DomainPolicy.BASE,
    ),
)
_register(
    "riesz",
    integral=Pipeline(
        _riesz_integral, "identity", None,
        "(I_+ f + I_- f) / (2 cos(pi alpha / 2)), a = -inf, b = inf",
        side="both", defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
    derivative=Pipeline(
        _riesz_derivative, "identity", 0.0,
        "-(D_+ f + D_- f) / (2 cos(pi alpha / 2)), a = -inf, b = inf",
        side="both", defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
)
_register(
    "feller",
    integral=Pipeline(
        _feller_integral, "identity", None,
        "C_-(theta, alpha) I_+ f + C_+(theta, alpha) I_- f",
        side="both", required=("theta",), defaults=_TRUNCATION,
        domain=DomainPolicy.TRUNCATED,
    ),
    derivative=Pipeline(
        _feller_derivative, "identity", 0.0,
        "-(C_+(theta, alpha) D_+ f + C_-(theta, alpha) D_- f)",
        side="both", required=("theta",), defaults=_TRUNCATION,
        domain=DomainPolicy.TRUNCATED,
    ),
)
_register(
    "weyl",
    integral=Pipeline(
        _weyl_integral, "identity", None, "psi(x) = x, b = inf",
        side="right", defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
    derivative=Pipeline(
        _weyl_derivative, "identity", 0.0, "psi(x) = x, b = inf, beta -> 0",
        side="right", defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
)
_register(
    "psi_caputo",
    derivative=Pipeline(
        _psi_caputo, "given", 1.0, "beta -> 1", domain=DomainPolicy.PSI,
    ),
)
_register(
    "psi_riemann_liouville",
    derivative=Pipeline(
        _psi_rl, "given", 0.0, "beta -> 0", domain=DomainPolicy.PSI,
    ),
)
_register(
    "caputo",
    derivative=Pipeline(
        _typed("identity", 1.0), "identity", 1.0, "psi(x) = x, beta -> 1",
    ),
)
_register(
    "caputo_hadamard",
    derivative=Pipeline(
        _typed("log", 1.0), "log", 1.0, "psi(x) = ln x, beta -> 1",
    ),
)
_register(
    "caputo_katugampola",
    derivative=Pipeline(
        _typed("power", 1.0, scaled=True), "pow:rho", 1.0,
        "rho^alpha CD^(alpha; x^rho)", required=("rho",),
    ),
)
_register(
    "hilfer_hadamard",
    derivative=Pipeline(
        _typed("log", None), "log", None, "psi(x) = ln x, free beta",
        required=("beta",),
    ),
)
_register(
    "hilfer_katugampola",
    derivative=Pipeline(
        _typed("power", None, scaled=True), "pow:rho", None,
        "rho^alpha HD^(alpha, beta; x^rho)", required=("rho", "beta"),
    ),
)
_register(
    "jumarie",
    derivative=Pipeline(
        _jumarie, "identity", 0.0, "psi(x) = x, a = 0, beta -> 0 on f - f(0)",
        domain=DomainPolicy.ORIGIN,
    ),
)
_register(
    "liouville_caputo",
    derivative=Pipeline(
        _liouville_derivative(1.0), "identity", 1.0,
        "psi(x) = x, a = -inf, beta -> 1",
        defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
)
_register(
    "cassar",
    derivative=Pipeline(
        _cassar_derivative, "identity", 0.0,
        "psi(x) = x, limit N -> inf of the derivative on [x, N]",
        side="right", defaults=_TRUNCATION, domain=DomainPolicy.TRUNCATED,
    ),
)
_register(
    "caputo_riesz",
    derivative=Pipeline(
        _caputo_riesz, "identity", 1.0,
        "(CD_a+ f + (-1)^n CD_b- f) / (2 cos(pi alpha / 2))",
        side="both",
    ),
)


def names() -> t.List[str]:
    return sorted(_REGISTRY)


def list_presets() -> t.List[PresetInfo]:
    rows = []
    for name in names():
        preset = _REGISTRY[name]
        parameters: t.List[str] = []
        for kind in preset.kinds:
            for p in preset.pipeline(kind).parameters:
                if p not in parameters:
                    parameters.append(p)
        rows.append(PresetInfo(
            name, tuple(k.value for k in preset.kinds), tuple(parameters),
            preset.citation,
        ))
    return rows


def resolve(
    name: str,
    params: t.Optional[t.Mapping[str, float]] = None,
) -> CatalogPreset:
    """Look up a preset and bind its parameters.

    Raises:
        UnknownNameError: Raised if `name` is not registered.
        MissingParameterError: Raised if a parameter every form of the
            preset requires is absent.
        InvalidParameterError: Raised if a parameter is not used by the
            preset or is not a finite number.
    """
    try:
        preset = _REGISTRY[name]
    except KeyError:
        raise UnknownNameError(
            f"unknown catalog operator '{name}'; see `psifrac list`"
        )
    params = dict(params or {})
    pipelines = [preset.pipeline(k) for k in preset.kinds]

    known = {p for pipe in pipelines for p in pipe.parameters}
    for key, value in params.items():
        if key not in known:
            raise InvalidParameterError(
                f"'{name}' takes no parameter '{key}'"
            )
        if not math.isfinite(value):
            raise InvalidParameterError(f"parameter {key} must be finite")

    required = set.intersection(*(set(pipe.required) for pipe in pipelines))
    missing = sorted(required - set(params))
    if missing:
        raise MissingParameterError(
            f"'{name}' requires parameter(s): {', '.join(missing)}"
        )
    logger.debug("resolved catalog operator %s with %r", name, params)
    return dataclasses.replace(preset, params=params)


def _interval(
    pipeline: Pipeline,
    params: t.Mapping[str, float],
    x: float,
    domain: t.Optional[t.Sequence[float]],
    psi: t.Optional[PsiSpec],
) -> t.Tuple[float, float]:
    policy = pipeline.domain
    if policy is DomainPolicy.PSI:
        if psi is None:
            raise MissingParameterError("this operator needs a psi transform")
        return psi.domain
    if policy is DomainPolicy.TRUNCATED:
        length = params["L"]
        if not length > 0.0:
            raise InvalidParameterError(f"L must be positive, got {length!r}")
        return (x - length, x + length)
    if policy is DomainPolicy.FINITE:
        if domain is None:
            raise InvalidDomainError("this operator needs an interval [a, b]")
        return (float(domain[0]), float(domain[1]))
    a = 0.0 if policy is DomainPolicy.ORIGIN else params["c"]
    b = float(domain[1]) if domain is not None else x
    return (a, b)


def _with_tail(
    result: EvalResult,
    req: Request,
    pipeline: Pipeline,
    kind: Kind,
) -> EvalResult:
    # |f(end)| L^(order-1) / |Gamma(order)| per truncated side, where order
    # is alpha for integrals and -alpha for derivatives
    length = req.params["L"]
    op = coerce(req.f, make_preset("identity", (), req.domain), req.config)
    ends = {
        "left": (req.x - length,),
        "right": (req.x + length,),
        "both": (req.x - length, req.x + length),
    }[pipeline.side]
    order = req.alpha if kind is Kind.INTEGRAL else -req.alpha
    kernel = length ** (order - 1.0) * abs(rgamma(order))
    tail = kernel * sum(abs(float(op(e))) for e in ends)

    notes = result.notes
    if tail > req.config.tol * max(abs(result.value), 1.0):
        logger.warning(
            "truncation tail estimate %g exceeds tolerance at L=%g",
            tail, length,
        )
        if NOTE_TRUNCATION not in notes:
            notes = notes + (NOTE_TRUNCATION,)
    return result._replace(err_est=result.err_est + tail, notes=notes)


def apply(
    preset: CatalogPreset,
    kind: t.Union[Kind, str],
    alpha: float,
    f: Function_t,
    x: float,
    config: t.Optional[QuadConfig] = None,
    domain: t.Optional[t.Sequence[float]] = None,
    psi: t.Optional[PsiSpec] = None,
) -> EvalResult:
    """Evaluate a resolved preset at x.

    Args:
        preset: Result of `resolve`.
        kind: `integral` or `derivative`.
        alpha: Order, positive.
        f: Expression, expression text, constant or callable of t.
        x: Evaluation point.
        config: Quadrature controls.
        domain: Interval (a, b) for presets on a finite interval; only b
            is used by presets anchored at 0 or at c.
        psi: Transform of the `psi_caputo` and `psi_riemann_liouville`
            presets.

    Raises:
        CosineZeroError: Raised by Riesz-type presets when
            cos(pi*alpha/2) = 0.
        MissingParameterError: Raised if the pipeline lacks a parameter
            or an interval.
    """
    kind = Kind(kind)
    pipeline = preset.pipeline(kind)
    if isinstance(f, Operand):
        raise InvalidParameterError(
            "catalog operators take expressions or callables, not operands"
        )
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise InvalidParameterError(f"order alpha must be positive, got {alpha!r}")

    missing = [p for p in pipeline.required if p not in preset.params]
    if missing:
        raise MissingParameterError(
            f"'{preset.name}' {kind.value} requires parameter(s): "
            f"{', '.join(missing)}"
        )
    params = dict(pipeline.defaults)
    params.update(preset.params)

    x = float(x)
    req = Request(
        alpha, f, x, _interval(pipeline, params, x, domain, psi), params,
        config or QuadConfig(), psi,
    )
    logger.debug(
        "catalog %s %s: psi=%s beta=%s interval=%r", preset.name, kind.value,
        pipeline.psi_kind, pipeline.beta_limit, req.domain,
    )
    result = pipeline.run(req)
    if pipeline.domain is DomainPolicy.TRUNCATED:
        result = _with_tail(result, req, pipeline, kind)
    return result
