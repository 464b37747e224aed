import math
import unittest

import numpy as np

from psifrac.error import (
    InvalidDomainError,
    InvalidParameterError,
    NonDifferentiableError,
    OutOfRangeError,
    UnknownIdentifierError,
)
from psifrac.psi import (
    PsiKind,
    from_selector,
    invert,
    make_custom,
    make_preset,
    validate,
)


class TestPresets(unittest.TestCase):

    def test_identity(self):
        psi = make_preset("identity", (), (0.0, 2.0))
        self.assertEqual(psi.value(1.5), 1.5)
        self.assertEqual(psi.derivative(1.5), 1.0)
        self.assertEqual(psi.s_bounds, (0.0, 2.0))
        self.assertEqual(psi.describe(), "identity")

    def test_log(self):
        psi = make_preset("log", (), (1.0, math.e))
        self.assertAlmostEqual(psi.value(math.e), 1.0, delta=1e-15)
        self.assertAlmostEqual(psi.derivative(2.0), 0.5)
        self.assertAlmostEqual(psi.inverse(0.5), math.exp(0.5), delta=1e-15)
        with self.assertRaises(InvalidDomainError):
            make_preset("log", (), (0.0, 1.0))

    def test_power(self):
        psi = make_preset("pow", (2.0,), (0.0, 1.0))
        self.assertIs(psi.kind, PsiKind.POWER)
        self.assertAlmostEqual(psi.value(0.5), 0.25)
        self.assertAlmostEqual(psi.derivative(0.5), 1.0)
        self.assertAlmostEqual(psi.inverse(0.25), 0.5)
        self.assertEqual(psi.describe(), "pow:2.0")
        with self.assertRaises(InvalidParameterError):
            make_preset("power", (0.0,), (0.0, 1.0))
        with self.assertRaises(InvalidDomainError):
            make_preset("power", (2.0,), (-1.0, 1.0))

    def test_empty_interval(self):
        with self.assertRaises(InvalidDomainError):
            make_preset("identity", (), (1.0, 1.0))
        with self.assertRaises(InvalidDomainError):
            make_preset("identity", (), (0.0, math.inf))

    def test_with_domain(self):
        psi = make_preset("log", (), (1.0, 2.0)).with_domain(2.0, 5.0)
        self.assertEqual(psi.domain, (2.0, 5.0))
        self.assertIs(psi.kind, PsiKind.LOG)
        custom = make_custom("x + x^3", (0.0, 1.0)).with_domain(-1.0, 1.0)
        self.assertEqual(custom.a, -1.0)

    def test_vectorized(self):
        psi = make_preset("log", (), (1.0, 3.0))
        xs = np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(psi.value(xs), np.log(xs))
        np.testing.assert_allclose(psi.inverse(np.log(xs)), xs)


class TestSelector(unittest.TestCase):

    def test_forms(self):
        self.assertIs(from_selector("identity", (0, 1)).kind, PsiKind.IDENTITY)
        self.assertIs(from_selector("log", (1, 2)).kind, PsiKind.LOG)
        self.assertEqual(from_selector("pow:0.5", (0, 1)).params, (0.5,))
        custom = from_selector("expr:x + sin(x)", (0, 1))
        self.assertIs(custom.kind, PsiKind.CUSTOM)
        self.assertAlmostEqual(custom.derivative(0.0), 2.0)

    def test_errors(self):
        with self.assertRaises(InvalidParameterError):
            from_selector("pow:abc", (0, 1))
        with self.assertRaises(InvalidParameterError):
            from_selector("cosh", (0, 1))
        with self.assertRaises(UnknownIdentifierError):
            from_selector("expr:x + y", (0, 1))
        with self.assertRaises(NonDifferentiableError):
            from_selector("expr:gamma(x)", (1, 2))


class TestValidate(unittest.TestCase):

    def test_presets_pass(self):
        for psi in (
            make_preset("identity", (), (0.0, 1.0)),
            make_preset("log", (), (1.0, math.e)),
            make_preset("power", (2.0,), (0.0, 1.0)),
            make_preset("power", (0.5,), (0.0, 4.0)),
        ):
            report = validate(psi)
            self.assertTrue(report.passed, report.violations)

    def test_not_monotone(self):
        report = validate(make_custom("sin(x)", (0.0, 3.0)))
        self.assertFalse(report.passed)
        self.assertEqual(report.violations[0].check, "monotone")

    def test_wrong_inverse(self):
        spec = make_custom("2 * x", (0.0, 1.0), inverse=lambda y: y)
        report = validate(spec)
        self.assertFalse(report.passed)
        self.assertIn("inverse", [v.check for v in report.violations])

    def test_evaluation_failure(self):
        report = validate(make_custom("ln(x)", (-1.0, 1.0)))
        self.assertFalse(report.passed)
        self.assertEqual(report.violations[0].check, "evaluation")


class TestInvert(unittest.TestCase):

    def test_bisection(self):
        spec = make_custom("x + x^3", (0.0, 2.0))
        ys = np.array([0.0, 0.5, 2.0, 10.0])
        xs = invert(spec, ys)
        np.testing.assert_allclose(xs + xs ** 3, ys, atol=1e-12)
        self.assertAlmostEqual(invert(spec, 2.0), 1.0, delta=1e-12)

    def test_out_of_range(self):
        spec = make_preset("identity", (), (0.0, 1.0))
        with self.assertRaises(OutOfRangeError):
            invert(spec, 1.5)
        with self.assertRaises(OutOfRangeError):
            invert(make_custom("x^3", (0.0, 1.0)), -0.1)


if __name__ == "__main__":
    unittest.main()
