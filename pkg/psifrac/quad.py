"""Product-integration quadrature for weakly singular Abel kernels.

Every operator reduces, after the substitution s = psi(t), to

    integral_{lower}^{upper} (upper - s)^(alpha - 1) g(s) ds

or to its mirror image with the singularity at `lower`. The smooth factor
g is replaced by its piecewise-linear interpolant on a uniform mesh and
the kernel moments on each panel are integrated exactly, which gives the
product trapezoidal rule.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
import typing as t

import numpy as np

from .error import (
    InvalidConfigError,
    InvalidDomainError,
    InvalidParameterError,
    NonfiniteSampleError,
)


__all__ = [
    "BatchResult",
    "EvalResult",
    "QuadConfig",
    "as_array_function",
    "integrate_batch",
    "product_weights",
    "weakly_singular_integral",
]


logger = logging.getLogger(__name__)

DEGENERATE_WIDTH = 1e-14
NOTE_TOLERANCE = "tolerance-not-met"
NOTE_SINGULAR = "singular-at-endpoint"

_GAUSS_POINTS = 12
_CHUNK_ELEMENTS = 1 << 20

Matrix_t = np.ndarray
BatchIntegrand_t = t.Callable[[Matrix_t, Matrix_t], Matrix_t]


@dataclasses.dataclass(frozen=True)
class QuadConfig:
    """Controls of the quadrature.

    Args:
        nodes: Panels of the coarsest mesh.
        refinement: Number of mesh doublings always performed; the value
            comes from the finest mesh and the error estimate from its
            difference to the previous one.
        tol: Target relative error; meshes keep doubling past
            `refinement` until it is met or `max_panels` is reached.
        max_panels: Upper limit of panels per integral.
        proxy_degree: Degree of the Chebyshev tables used when an operator
            output is fed into another operator.
    """

    nodes: int = 512
    refinement: int = 2
    tol: float = 1e-8
    max_panels: int = 16384
    proxy_degree: int = 64

    def __post_init__(self) -> None:
        if self.nodes < 9:
            raise InvalidConfigError(f"nodes must be >= 9, got {self.nodes}")
        if self.refinement < 1:
            raise InvalidConfigError(
                f"refinement must be >= 1, got {self.refinement}"
            )
        if not (1e-15 < self.tol < 1e-2):
            raise InvalidConfigError(
                f"tol must lie in (1e-15, 1e-2), got {self.tol!r}"
            )
        if self.max_panels < self.finest_panels:
            raise InvalidConfigError(
                f"max_panels must be >= nodes * 2**refinement "
                f"= {self.finest_panels}"
            )
        if self.proxy_degree < 8:
            raise InvalidConfigError(
                f"proxy_degree must be >= 8, got {self.proxy_degree}"
            )

    @property
    def finest_panels(self) -> int:
        return self.nodes * 2 ** self.refinement


class EvalResult(t.NamedTuple):
    """Value of one operator evaluation with its error estimate."""

    value: float
    err_est: float
    panels_used: int
    notes: t.Tuple[str, ...] = ()

    def scale(self, factor: float) -> EvalResult:
        return self._replace(
            value=self.value * factor,
            err_est=self.err_est * abs(factor),
        )

    def offset(self, amount: float) -> EvalResult:
        return self._replace(value=self.value + amount)

    def plus(self, other: EvalResult) -> EvalResult:
        notes = self.notes + tuple(n for n in other.notes if n not in self.notes)
        return EvalResult(
            self.value + other.value,
            self.err_est + other.err_est,
            max(self.panels_used, other.panels_used),
            notes,
        )


class BatchResult(t.NamedTuple):
    """Row-wise results of `integrate_batch`."""

    values: np.ndarray
    err_est: np.ndarray
    panels_used: np.ndarray
    notes: t.Tuple[str, ...] = ()

    def row(self, i: int) -> EvalResult:
        return EvalResult(
            float(self.values[i]),
            float(self.err_est[i]),
            int(self.panels_used[i]),
            self.notes,
        )


def as_array_function(
    func: t.Callable[..., t.Any],
) -> t.Callable[[np.ndarray], np.ndarray]:
    """Wrap a callable so it maps arrays to arrays of the same shape.

    Callables written for scalars only are vectorized elementwise.
    """
    elementwise = np.vectorize(func, otypes=[float])

    def wrapper(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        try:
            with np.errstate(all="ignore"):
                out = np.asarray(func(x), dtype=float)
        except (TypeError, ValueError):
            return elementwise(x)
        if out.shape != x.shape:
            if out.ndim == 0:
                return np.full(x.shape, float(out))
            return elementwise(x)
        return out

    return wrapper


@functools.lru_cache(maxsize=64)
def _unit_weights(panels: int, exponent: float) -> np.ndarray:
    # Moments of (m + u)^(exponent - 1) against u and 1 - u on [0, 1],
    # where m counts panels between the current one and the singularity.
    far = np.empty(panels)
    near = np.empty(panels)
    far[0] = 1.0 / (exponent + 1.0)
    near[0] = 1.0 / exponent - far[0]

    if panels > 1:
        u, w = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
        u = 0.5 * (u + 1.0)
        w = 0.5 * w
        m = np.arange(1, panels, dtype=float)[:, None]
        kernel = (m + u[None, :]) ** (exponent - 1.0)
        far[1:] = kernel @ (w * u)
        near[1:] = kernel @ (w * (1.0 - u))

    weights = np.zeros(panels + 1)
    # panel j spans nodes j and j + 1 at distance index m = panels - 1 - j
    m_index = panels - 1 - np.arange(panels)
    weights[:-1] += far[m_index]
    weights[1:] += near[m_index]
    weights.setflags(write=False)
    return weights


def product_weights(
    panels: int,
    exponent: float,
    at_upper_singularity: bool = True,
) -> np.ndarray:
    """Product-trapezoid weights on the unit mesh 0, 1, ..., panels.

    Scaling by h**exponent gives the weights of a mesh with spacing h.
    """
    if exponent <= 0.0:
        raise InvalidParameterError(
            f"kernel exponent must be positive, got {exponent!r}"
        )
    weights = _unit_weights(int(panels), float(exponent))
    return weights if at_upper_singularity else weights[::-1]


def _patch_endpoint(values: np.ndarray, column: int) -> None:
    # A NaN at an end node is a removable 0/0; fill it from the quadratic
    # through the three neighbouring nodes.
    step = 1 if column == 0 else -1
    col = values[:, column]
    holes = np.isnan(col)
    if np.any(holes):
        g1 = values[holes, column + step]
        g2 = values[holes, column + 2 * step]
        g3 = values[holes, column + 3 * step]
        col[holes] = 3.0 * g1 - 3.0 * g2 + g3


def _level(
    g: BatchIntegrand_t,
    lower: np.ndarray,
    upper: np.ndarray,
    exponent: float,
    at_upper: bool,
    panels: int,
    removable_endpoints: bool = False,
) -> np.ndarray:
    weights = product_weights(panels, exponent, at_upper)
    fractions = np.linspace(0.0, 1.0, panels + 1)
    rows = max(1, _CHUNK_ELEMENTS // (panels + 1))
    out = np.empty(lower.shape)

    for start in range(0, lower.size, rows):
        lo = lower[start:start + rows, None]
        hi = upper[start:start + rows, None]
        s = lo + (hi - lo) * fractions[None, :]
        s[:, 0] = lo[:, 0]
        s[:, -1] = hi[:, 0]
        singular = hi if at_upper else lo

        with np.errstate(all="ignore"):
            values = np.array(
                np.broadcast_to(g(s, singular), s.shape), dtype=float
            )
        if removable_endpoints:
            _patch_endpoint(values, 0)
            _patch_endpoint(values, -1)

        bad = ~np.isfinite(values)
        if np.any(bad):
            raise NonfiniteSampleError(float(s[bad][0]))

        h = (hi[:, 0] - lo[:, 0]) / panels
        out[start:start + rows] = (values @ weights) * h ** exponent
    return out


def integrate_batch(
    g: BatchIntegrand_t,
    lower: t.Union[float, np.ndarray],
    upper: t.Union[float, np.ndarray],
    exponent: float,
    at_upper_singularity: bool,
    config: QuadConfig,
    removable_endpoints: bool = False,
) -> BatchResult:
    """Many weakly singular integrals sharing one exponent.

    `g(s, singular)` receives the abscissa matrix (one row per integral)
    and the column of singular endpoints. Refinement is decided row by
    row, so each row's result depends only on its own data.

    With `removable_endpoints=True` a NaN at the first or last node is
    taken as a removable 0/0 and filled by quadratic extrapolation from
    the three neighbouring nodes. Otherwise it raises like any other
    nonfinite sample.

    Raises:
        NonfiniteSampleError: Raised if g is not finite at a node.
    """
    lower, upper = np.broadcast_arrays(
        np.atleast_1d(np.asarray(lower, dtype=float)),
        np.atleast_1d(np.asarray(upper, dtype=float)),
    )
    lower = lower.ravel().copy()
    upper = upper.ravel().copy()
    if exponent <= 0.0:
        raise InvalidParameterError(
            f"kernel exponent must be positive, got {exponent!r}"
        )
    if np.any(upper < lower):
        raise InvalidDomainError("integration bounds must satisfy lower <= upper")

    values = np.zeros(lower.shape)
    err = np.zeros(lower.shape)
    panels_used = np.full(lower.shape, config.nodes)
    active = np.flatnonzero(upper - lower >= DEGENERATE_WIDTH)
    unmet = False

    panels = config.nodes
    previous = _level(
        g, lower[active], upper[active], exponent, at_upper_singularity,
        panels, removable_endpoints,
    )
    level = 0
    while active.size:
        panels *= 2
        level += 1
        current = _level(
            g, lower[active], upper[active], exponent, at_upper_singularity,
            panels, removable_endpoints,
        )
        diff = np.abs(current - previous)
        values[active] = current
        err[active] = diff
        panels_used[active] = panels

        if level < config.refinement:
            previous = current
            continue

        done = diff <= config.tol * np.maximum(np.abs(current), 1.0)
        if panels * 2 > config.max_panels:
            if not np.all(done):
                unmet = True
                logger.warning(
                    "quadrature tolerance %g not met at %d panels "
                    "(worst estimate %g)",
                    config.tol, panels, float(np.max(diff[~done])),
                )
            break
        keep = ~done
        active = active[keep]
        previous = current[keep]
        if active.size:
            logger.debug(
                "refining %d integral(s) to %d panels", active.size,
                panels * 2,
            )

    notes = (NOTE_TOLERANCE,) if unmet else ()
    return BatchResult(values, err, panels_used, notes)


def weakly_singular_integral(
    g: t.Callable[[t.Any], t.Any],
    lower: float,
    upper: float,
    exponent: float,
    at_upper_singularity: bool = True,
    config: t.Optional[QuadConfig] = None,
    removable_endpoints: bool = False,
) -> EvalResult:
    """Integral of (upper - s)^(exponent-1) g(s) over [lower, upper].

    With `at_upper_singularity=False` the kernel is (s - lower)^(exponent-1).

    Args:
        g: Smooth factor; called with numpy arrays when it supports them.
        lower: Lower bound.
        upper: Upper bound, not below `lower`.
        exponent: Kernel exponent alpha > 0.
        at_upper_singularity: Side of the kernel singularity.
        config: Quadrature controls; defaults to `QuadConfig()`.
        removable_endpoints: Fill a NaN at an end node from its
            neighbours instead of raising.

    Returns:
        Value and error estimate. Intervals shorter than 1e-14 give 0.

    Raises:
        InvalidDomainError: Raised if `upper < lower`.
        InvalidParameterError: Raised if `exponent <= 0`.
        NonfiniteSampleError: Raised if g is not finite at a node.
    """
    if config is None:
        config = QuadConfig()
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise InvalidDomainError("integration bounds must be finite")
    func = as_array_function(g)
    batch = integrate_batch(
        lambda s, _: func(s), lower, upper, exponent, at_upper_singularity,
        config, removable_endpoints,
    )
    return batch.row(0)
