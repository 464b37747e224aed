import math
import random
import typing as t

import mpmath


SEED = 20240611

Scalar_t = t.Callable[[float], float]


def make_rng(offset: int = 0) -> random.Random:
    return random.Random(SEED + offset)


def relative_error(actual: float, expected: float) -> float:
    return abs(actual - expected) / max(abs(expected), 1e-300)


def mp_gamma(x: float) -> float:
    return float(mpmath.gamma(x))


def mp_left_integral(
    f: t.Callable[[t.Any], t.Any],
    alpha: float,
    a: float,
    x: float,
    psi: t.Callable[[t.Any], t.Any] = lambda t_: t_,
    dpsi: t.Callable[[t.Any], t.Any] = lambda t_: 1,
) -> float:
    """Left psi-fractional integral by tanh-sinh quadrature in mpmath."""
    if x == a:
        return 0.0
    with mpmath.workdps(30):
        sx = psi(mpmath.mpf(x))

        def integrand(u):
            return dpsi(u) * (sx - psi(u)) ** (alpha - 1) * f(u)

        value = mpmath.quad(integrand, [a, x]) / mpmath.gamma(alpha)
    return float(value)


def mp_right_integral(
    f: t.Callable[[t.Any], t.Any],
    alpha: float,
    x: float,
    b: float,
    psi: t.Callable[[t.Any], t.Any] = lambda t_: t_,
    dpsi: t.Callable[[t.Any], t.Any] = lambda t_: 1,
) -> float:
    if x == b:
        return 0.0
    with mpmath.workdps(30):
        sx = psi(mpmath.mpf(x))

        def integrand(u):
            return dpsi(u) * (psi(u) - sx) ** (alpha - 1) * f(u)

        value = mpmath.quad(integrand, [x, b]) / mpmath.gamma(alpha)
    return float(value)


def mp_derivative(func: Scalar_t, x: float, n: int = 1) -> float:
    with mpmath.workdps(30):
        return float(mpmath.diff(func, x, n))


def interior_points(a: float, b: float, count: int = 5) -> t.List[float]:
    return [a + (b - a) * (i + 0.5) / count for i in range(count)]


LOG_PSI = (mpmath.log, lambda u: 1 / u)
POW2_PSI = (lambda u: u ** 2, lambda u: 2 * u)

E = math.e
