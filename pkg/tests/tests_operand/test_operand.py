import math
import unittest

import numpy as np

from psifrac.error import (
    ExtrapolationError,
    InvalidParameterError,
    StepUnderflowError,
)
from psifrac.operand import (
    CallablePart,
    ExprPart,
    Operand,
    PowerTerm,
    ProxyPart,
    Side,
    Stage,
    coerce,
    distance,
    endpoint_limit,
    require_interior_step,
)
from psifrac.psi import make_preset
from psifrac.quad import NOTE_SINGULAR, BatchResult


class SineStage(Stage):

    def __init__(self):
        self.calls = 0

    def evaluate(self, s):
        self.calls += 1
        s = np.asarray(s, dtype=float)
        return BatchResult(np.sin(s), np.full(s.shape, 1e-12), np.zeros(s.shape, dtype=int))


class TestPowerTerm(unittest.TestCase):

    def setUp(self):
        self.psi = make_preset("identity", (), (0.0, 1.0))

    def test_value(self):
        left = PowerTerm(2.0, 0.5, Side.LEFT)
        right = PowerTerm(1.0, 2.0, Side.RIGHT)
        self.assertAlmostEqual(float(left.value(self.psi, np.array(0.25))), 1.0)
        self.assertAlmostEqual(float(right.value(self.psi, np.array(0.25))), 0.5625)

    def test_derivative(self):
        term = PowerTerm(2.0, 3.0, Side.LEFT).derivative(2, Side.LEFT)
        self.assertEqual(term, PowerTerm(12.0, 1.0, Side.LEFT))
        # d/dt of (1 - t)^2 is -2 (1 - t)
        mirrored = PowerTerm(1.0, 2.0, Side.RIGHT).derivative(1, Side.LEFT)
        self.assertEqual(mirrored, PowerTerm(-2.0, 1.0, Side.RIGHT))
        self.assertEqual(
            PowerTerm(1.0, 2.0, Side.RIGHT).derivative(1, Side.RIGHT),
            PowerTerm(2.0, 1.0, Side.RIGHT),
        )

    def test_distance_is_clipped(self):
        np.testing.assert_array_equal(
            distance(self.psi, Side.LEFT, np.array([-0.1, 0.3])), [0.0, 0.3],
        )
        self.assertAlmostEqual(float(distance(self.psi, Side.RIGHT, np.array(0.3))), 0.7)


class TestCoerce(unittest.TestCase):

    def setUp(self):
        self.psi = make_preset("log", (), (1.0, math.e))

    def test_forms(self):
        self.assertIsInstance(coerce("x^2", self.psi).regular, ExprPart)
        self.assertIsInstance(coerce(3, self.psi).regular, ExprPart)
        self.assertIsInstance(coerce(np.sin, self.psi).regular, CallablePart)
        op = coerce("x", self.psi)
        self.assertIs(coerce(op, self.psi), op)
        self.assertEqual(coerce(2.5, self.psi)(2.0), 2.5)

    def test_rejects(self):
        with self.assertRaises(InvalidParameterError):
            coerce([1.0], self.psi)
        other = make_preset("log", (), (1.0, 2.0))
        with self.assertRaises(InvalidParameterError):
            coerce(coerce("x", self.psi), other)

    def test_stage_is_tabulated(self):
        psi = make_preset("identity", (), (0.0, 1.0))
        stage = SineStage()
        op = coerce(Operand(psi, stage), psi)
        self.assertIsInstance(op.regular, ProxyPart)
        self.assertEqual(stage.calls, 1)
        xs = np.linspace(0.0, 1.0, 11)
        np.testing.assert_allclose(op(xs), np.sin(xs), atol=1e-13)
        np.testing.assert_allclose(
            op.regular_derivative(1, xs, Side.LEFT), np.cos(xs), atol=1e-10,
        )
        self.assertEqual(op.regular.err_floor, 1e-12)


class TestRegularDerivative(unittest.TestCase):

    def setUp(self):
        self.psi = make_preset("log", (), (1.0, math.e))

    def test_symbolic(self):
        # (x d/dx) x^2 = 2 x^2
        op = coerce("x^2", self.psi)
        s = np.array([math.log(2.0)])
        self.assertAlmostEqual(float(op.regular_derivative(1, s, Side.LEFT)[0]), 8.0)
        self.assertAlmostEqual(float(op.regular_derivative(1, s, Side.RIGHT)[0]), -8.0)
        self.assertAlmostEqual(float(op.regular_derivative(2, s, Side.LEFT)[0]), 16.0)

    def test_differences(self):
        op = coerce(lambda x: x ** 2, self.psi)
        s = np.array([math.log(2.0)])
        self.assertAlmostEqual(float(op.regular_derivative(1, s, Side.LEFT)[0]), 8.0, delta=1e-6)
        self.assertAlmostEqual(float(op.regular_derivative(2, s, Side.LEFT)[0]), 16.0, delta=1e-4)

    def test_non_differentiable_falls_back(self):
        op = coerce("gamma(x)", self.psi)
        s = np.array([math.log(1.5)])
        # x Gamma'(x) at 1.5 with Gamma'(1.5) = Gamma(1.5) digamma(1.5)
        expected = 1.5 * math.gamma(1.5) * 0.03648997397857652
        self.assertAlmostEqual(float(op.regular_derivative(1, s, Side.LEFT)[0]), expected, delta=1e-6)

    def test_step_underflow(self):
        op = coerce(np.exp, self.psi)
        with self.assertRaises(StepUnderflowError):
            require_interior_step(op.regular, 1, 1.0 + 1e-12)
        require_interior_step(op.regular, 1, 2.0)
        require_interior_step(coerce("x", self.psi).regular, 3, 1.0)


class TestTaylor(unittest.TestCase):

    def test_identity_exp(self):
        psi = make_preset("identity", (), (0.0, 1.0))
        op = coerce("exp(x)", psi)
        np.testing.assert_allclose(op.taylor(Side.LEFT, 4), [1.0] * 4)
        np.testing.assert_allclose(
            op.taylor(Side.RIGHT, 3), [math.e, -math.e, math.e], rtol=1e-14,
        )

    def test_log_psi(self):
        psi = make_preset("log", (), (1.0, math.e))
        np.testing.assert_allclose(coerce("x", psi).taylor(Side.LEFT, 3), [1.0] * 3)

    def test_limit_fallback(self):
        psi = make_preset("identity", (), (0.0, 1.0))
        coefs = coerce("sin(x) / x", psi).taylor(Side.LEFT, 2)
        self.assertAlmostEqual(coefs[0], 1.0, delta=1e-9)
        self.assertAlmostEqual(coefs[1], 0.0, delta=1e-6)

    def test_vanishing_skips_regular(self):
        psi = make_preset("identity", (), (0.0, 1.0))
        op = Operand(
            psi, None, (PowerTerm(1.0, 2.0, Side.RIGHT),), Side.LEFT, 1.0,
        )
        # j = 0 comes from the right-anchored term alone: (1 - 0)^2
        self.assertEqual(op.taylor(Side.LEFT, 1), [1.0])


class TestEndpointLimit(unittest.TestCase):

    def setUp(self):
        self.psi = make_preset("identity", (), (0.0, 1.0))

    def test_removable(self):
        value = endpoint_limit(lambda s: np.sin(s) / s, self.psi, Side.LEFT)
        self.assertAlmostEqual(value, 1.0, delta=1e-9)
        value = endpoint_limit(lambda s: np.sin(1.0 - s) / (1.0 - s), self.psi, Side.RIGHT)
        self.assertAlmostEqual(value, 1.0, delta=1e-9)

    def test_constant(self):
        self.assertEqual(endpoint_limit(lambda s: np.full(s.shape, 2.0), self.psi, Side.LEFT), 2.0)

    def test_divergent(self):
        with self.assertRaises(ExtrapolationError):
            endpoint_limit(lambda s: 1.0 / s, self.psi, Side.LEFT)
        with self.assertRaises(ExtrapolationError):
            endpoint_limit(lambda s: np.full(s.shape, np.nan), self.psi, Side.LEFT)


class TestEvaluate(unittest.TestCase):

    def test_powers_and_regular(self):
        psi = make_preset("identity", (), (0.0, 1.0))
        op = Operand(
            psi, coerce("x", psi).regular, (PowerTerm(2.0, 0.5, Side.LEFT),),
        )
        batch = op.evaluate([0.25, 1.0])
        np.testing.assert_allclose(batch.values, [1.25, 3.0])
        self.assertEqual(op(np.array([[0.25]])).shape, (1, 1))

    def test_singular_note(self):
        psi = make_preset("identity", (), (0.0, 1.0))
        op = Operand(psi, None, (PowerTerm(1.0, -0.5, Side.LEFT),))
        with self.assertLogs("psifrac.operand", level="WARNING"):
            batch = op.evaluate([0.0, 0.5])
        self.assertIn(NOTE_SINGULAR, batch.notes)
        self.assertTrue(math.isinf(batch.values[0]))


if __name__ == "__main__":
    unittest.main()
