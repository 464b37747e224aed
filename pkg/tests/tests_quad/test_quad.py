import math
import unittest

import mpmath
import numpy as np

from psifrac.error import (
    InvalidConfigError,
    InvalidDomainError,
    InvalidParameterError,
    NonfiniteSampleError,
)
from psifrac.quad import (
    NOTE_TOLERANCE,
    EvalResult,
    QuadConfig,
    as_array_function,
    integrate_batch,
    product_weights,
    weakly_singular_integral,
)

from .. import relative_error


def _fixed(nodes: int) -> QuadConfig:
    # one doubling, no adaptive refinement past it
    return QuadConfig(nodes=nodes, refinement=1, tol=1e-3, max_panels=2 * nodes)


def _exp_kernel_integral(alpha: float) -> float:
    # integral_0^1 (1 - s)^(alpha - 1) e^s ds = e * lowergamma(alpha, 1)
    return float(mpmath.e * mpmath.gammainc(alpha, 0, 1))


class TestQuadConfig(unittest.TestCase):

    def test_defaults(self):
        config = QuadConfig()
        self.assertEqual(config.nodes, 512)
        self.assertEqual(config.finest_panels, 2048)

    def test_invalid(self):
        with self.assertRaises(InvalidConfigError):
            QuadConfig(nodes=8)
        with self.assertRaises(InvalidConfigError):
            QuadConfig(refinement=0)
        with self.assertRaises(InvalidConfigError):
            QuadConfig(tol=0.1)
        with self.assertRaises(InvalidConfigError):
            QuadConfig(nodes=1024, refinement=5)
        with self.assertRaises(InvalidConfigError):
            QuadConfig(proxy_degree=4)


class TestWeights(unittest.TestCase):

    def test_sum_is_kernel_mass(self):
        # weights integrate constants exactly: sum = panels^alpha / alpha
        for alpha in (0.3, 1.0, 1.7):
            w = product_weights(64, alpha)
            self.assertLess(relative_error(w.sum(), 64 ** alpha / alpha), 1e-13)

    def test_mirror(self):
        w = product_weights(16, 0.5)
        np.testing.assert_array_equal(product_weights(16, 0.5, False), w[::-1])

    def test_invalid_exponent(self):
        with self.assertRaises(InvalidParameterError):
            product_weights(16, 0.0)


class TestWeaklySingularIntegral(unittest.TestCase):

    def test_linear_is_exact(self):
        for alpha in (0.25, 0.5, 1.5):
            result = weakly_singular_integral(lambda s: 2.0 + s, 0.0, 1.0, alpha)
            expected = 2.0 / alpha + 1.0 / (alpha * (alpha + 1.0))
            self.assertLess(relative_error(result.value, expected), 1e-12)

    def test_smooth_factor(self):
        for alpha in (0.25, 0.5, 0.9):
            result = weakly_singular_integral(np.exp, 0.0, 1.0, alpha)
            expected = _exp_kernel_integral(alpha)
            self.assertLess(relative_error(result.value, expected), 1e-8)
            self.assertLess(result.err_est, 1e-6)
            self.assertEqual(result.notes, ())

    def test_singularity_at_lower(self):
        result = weakly_singular_integral(
            lambda s: np.exp(-s), 0.0, 1.0, 0.5, at_upper_singularity=False,
        )
        expected = float(mpmath.gammainc(0.5, 0, 1))
        self.assertLess(relative_error(result.value, expected), 1e-8)

    def test_removable_endpoint(self):
        # sin(s)/s is 0/0 at s = 0
        result = weakly_singular_integral(
            lambda s: np.sin(s) / s, 0.0, 1.0, 0.5, removable_endpoints=True,
        )
        expected = float(mpmath.quad(lambda s: (1 - s) ** -0.5 * mpmath.sinc(s), [0, 1]))
        self.assertLess(relative_error(result.value, expected), 1e-7)

    def test_endpoint_nan_raises_by_default(self):
        def g(s):
            s = np.asarray(s, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(s == 0.0, np.nan, 1.0 / np.sqrt(s))

        with self.assertRaises(NonfiniteSampleError) as cm:
            weakly_singular_integral(g, 0.0, 1.0, 0.5)
        self.assertEqual(cm.exception.abscissa, 0.0)

        with self.assertRaises(NonfiniteSampleError) as cm:
            weakly_singular_integral(lambda s: np.sin(s) / s, 0.0, 1.0, 0.5)
        self.assertEqual(cm.exception.abscissa, 0.0)

    def test_batch_endpoint_nan(self):
        def g(s, singular):
            return (np.sin(singular) - np.sin(s)) / (singular - s)

        with self.assertRaises(NonfiniteSampleError):
            integrate_batch(g, 0.0, 1.0, 0.5, True, QuadConfig())
        batch = integrate_batch(
            g, 0.0, 1.0, 0.5, True, QuadConfig(), removable_endpoints=True,
        )
        self.assertTrue(np.all(np.isfinite(batch.values)))

    def test_scalar_callable(self):
        result = weakly_singular_integral(lambda s: math.cos(s), 0.0, 1.0, 1.0)
        self.assertLess(relative_error(result.value, math.sin(1.0)), 1e-8)

    def test_degenerate(self):
        result = weakly_singular_integral(np.exp, 1.0, 1.0, 0.5)
        self.assertEqual(result.value, 0.0)

    def test_errors(self):
        with self.assertRaises(InvalidDomainError):
            weakly_singular_integral(np.exp, 1.0, 0.0, 0.5)
        with self.assertRaises(InvalidDomainError):
            weakly_singular_integral(np.exp, 0.0, math.inf, 0.5)
        with self.assertRaises(InvalidParameterError):
            weakly_singular_integral(np.exp, 0.0, 1.0, -0.5)
        with self.assertRaises(NonfiniteSampleError) as cm:
            weakly_singular_integral(lambda s: 1.0 / (s - 0.5), 0.0, 1.0, 0.5)
        self.assertEqual(cm.exception.abscissa, 0.5)

    def test_tolerance_not_met(self):
        config = QuadConfig(nodes=16, refinement=1, tol=1e-14, max_panels=32)
        with self.assertLogs("psifrac.quad", level="WARNING"):
            result = weakly_singular_integral(np.exp, 0.0, 1.0, 0.5, config=config)
        self.assertIn(NOTE_TOLERANCE, result.notes)
        self.assertEqual(result.panels_used, 32)

    def test_observed_order(self):
        for alpha in (0.25, 0.5, 0.9):
            exact = _exp_kernel_integral(alpha)
            errors = [
                abs(weakly_singular_integral(np.exp, 0.0, 1.0, alpha, config=_fixed(n)).value - exact)
                for n in (64, 128, 256)
            ]
            for coarse, fine in zip(errors, errors[1:]):
                self.assertGreaterEqual(math.log2(coarse / fine), 1.9, alpha)


class TestBatch(unittest.TestCase):

    def test_rows_are_independent(self):
        config = QuadConfig()
        uppers = np.array([0.5, 1.0, 2.0])
        batch = integrate_batch(
            lambda s, _: np.cos(s), 0.0, uppers, 0.7, True, config,
        )
        for i, upper in enumerate(uppers):
            single = weakly_singular_integral(np.cos, 0.0, upper, 0.7, config=config)
            self.assertAlmostEqual(batch.row(i).value, single.value, delta=1e-14)
            self.assertEqual(batch.row(i).panels_used, single.panels_used)

    def test_singular_column(self):
        seen = []

        def g(s, singular):
            seen.append(singular.copy())
            return np.ones_like(s)

        integrate_batch(g, np.array([0.0, 1.0]), 3.0, 0.5, False, QuadConfig())
        np.testing.assert_array_equal(seen[0][:, 0], [0.0, 1.0])


class TestEvalResult(unittest.TestCase):

    def test_arithmetic(self):
        a = EvalResult(1.0, 0.1, 64, ("x",))
        b = EvalResult(2.0, 0.2, 128, ("x", "y"))
        total = a.plus(b.scale(-2.0)).offset(1.0)
        self.assertEqual(total.value, -2.0)
        self.assertAlmostEqual(total.err_est, 0.5)
        self.assertEqual(total.panels_used, 128)
        self.assertEqual(total.notes, ("x", "y"))

    def test_as_array_function(self):
        func = as_array_function(lambda x: 1.0 if x > 0 else -1.0)
        np.testing.assert_array_equal(func(np.array([-1.0, 2.0])), [-1.0, 1.0])
        const = as_array_function(lambda x: 3.0)
        self.assertEqual(const(np.zeros((2, 2))).shape, (2, 2))


if __name__ == "__main__":
    unittest.main()
