import math
import random
import unittest

import numpy as np

from psifrac.error import (
    DomainError,
    NonDifferentiableError,
    ParseError,
    UnknownIdentifierError,
)
from psifrac.expr import (
    NodeKind,
    constant,
    differentiate,
    evaluate,
    has_variable,
    parse,
    product,
    quotient,
    to_text,
)
from psifrac.specialfn import MLParams, mittag_leffler

from .. import make_rng


def _random_expr(rng: random.Random, depth: int) -> str:
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(["x", f"{rng.uniform(0.5, 2.0):.3f}", "pi"])

    a = _random_expr(rng, depth - 1)
    choice = rng.randrange(9)
    if choice == 0:
        return f"({a} + {_random_expr(rng, depth - 1)})"
    if choice == 1:
        return f"({a} - {_random_expr(rng, depth - 1)})"
    if choice == 2:
        return f"({a}) * ({_random_expr(rng, depth - 1)})"
    if choice == 3:
        return f"({a}) / (2 + sin({_random_expr(rng, depth - 1)}))"
    if choice == 4:
        return f"exp(sin({a}))"
    if choice == 5:
        return f"cos({a})"
    if choice == 6:
        return f"sqrt(1 + ({a})^2)"
    if choice == 7:
        return f"ln(2 + cos({a}))"
    return f"(1 + x)^({rng.uniform(-1.5, 2.5):.3f})"


def _central_difference(node, x: float, h: float = 1e-5) -> float:
    return (evaluate(node, x + h) - evaluate(node, x - h)) / (2.0 * h)


class TestParse(unittest.TestCase):

    def test_precedence(self):
        self.assertEqual(evaluate(parse("1 + 2 * 3"), 0.0), 7.0)
        self.assertEqual(evaluate(parse("-x^2"), 3.0), -9.0)
        self.assertEqual(evaluate(parse("2^3^2"), 0.0), 512.0)
        self.assertEqual(evaluate(parse("2^-1"), 0.0), 0.5)
        self.assertEqual(evaluate(parse("8 / 4 / 2"), 0.0), 1.0)
        self.assertEqual(evaluate(parse("10 - 4 - 3"), 0.0), 3.0)

    def test_functions_and_constants(self):
        self.assertAlmostEqual(evaluate(parse("sin(pi / 2)"), 0.0), 1.0)
        self.assertAlmostEqual(evaluate(parse("ln(e)"), 0.0), 1.0)
        self.assertAlmostEqual(evaluate(parse("pow(x, 0.5)"), 4.0), 2.0)
        self.assertAlmostEqual(evaluate(parse("gamma(0.5)^2"), 0.0), math.pi)
        self.assertAlmostEqual(
            evaluate(parse("mlf(0.5, -x)"), 1.0),
            mittag_leffler(MLParams(0.5), -1.0),
        )

    def test_scientific_numbers(self):
        self.assertEqual(evaluate(parse("1.5e2 + .5"), 0.0), 150.5)

    def test_error_offsets(self):
        with self.assertRaises(ParseError) as cm:
            parse("1 + * 2")
        self.assertEqual(cm.exception.offset, 4)
        self.assertEqual(
            str(cm.exception), "parse error at byte 4: expected expression, got '*'"
        )

        with self.assertRaises(ParseError) as cm:
            parse("(x + 1")
        self.assertEqual(cm.exception.offset, 6)

        with self.assertRaises(ParseError) as cm:
            parse("x $ 1")
        self.assertEqual(cm.exception.offset, 2)

    def test_offsets_count_bytes(self):
        with self.assertRaises(ParseError) as cm:
            parse("é")
        self.assertEqual(cm.exception.offset, 0)
        with self.assertRaises(UnknownIdentifierError) as cm:
            parse("1 + y")
        self.assertEqual(cm.exception.offset, 4)

    def test_arity(self):
        with self.assertRaises(ParseError):
            parse("pow(x)")
        with self.assertRaises(ParseError):
            parse("sin")
        with self.assertRaises(ParseError):
            parse("x(1)")

    def test_size_limit(self):
        with self.assertRaises(ParseError):
            parse("x+" * 40000 + "x")

    def test_text_round_trip(self):
        for text in ("-x^2 + 3 * sin(x) / 2", "(1 + x)^-0.5", "mlf(0.7, -2 * x)"):
            node = parse(text)
            again = parse(to_text(node))
            for x in (0.3, 1.1):
                self.assertAlmostEqual(evaluate(node, x), evaluate(again, x), delta=1e-15)


class TestEvaluate(unittest.TestCase):

    def test_array(self):
        xs = np.linspace(0.0, 1.0, 7)
        values = evaluate(parse("x^2 + 1"), xs)
        np.testing.assert_allclose(values, xs ** 2 + 1.0)
        self.assertEqual(evaluate(parse("3"), xs).shape, xs.shape)

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            evaluate(parse("ln(x)"), 0.0)
        with self.assertRaises(DomainError):
            evaluate(parse("sqrt(x)"), -1.0)
        with self.assertRaises(DomainError):
            evaluate(parse("x^0.5"), np.array([1.0, -2.0]))

    def test_ieee_division(self):
        self.assertTrue(math.isinf(evaluate(parse("1 / x"), 0.0)))

    def test_integer_power_of_negative_base(self):
        self.assertEqual(evaluate(parse("x^3"), -2.0), -8.0)


class TestDifferentiate(unittest.TestCase):

    def test_rules(self):
        cases = [
            ("x^3", lambda x: 3 * x ** 2),
            ("sin(x) * exp(x)", lambda x: math.exp(x) * (math.sin(x) + math.cos(x))),
            ("ln(x) / x", lambda x: (1 - math.log(x)) / x ** 2),
            ("x^x", lambda x: x ** x * (math.log(x) + 1)),
            ("2^x", lambda x: 2 ** x * math.log(2)),
            ("sqrt(x)", lambda x: 0.5 / math.sqrt(x)),
        ]
        for text, expected in cases:
            d = differentiate(parse(text))
            for x in (0.4, 1.3):
                self.assertAlmostEqual(evaluate(d, x), expected(x), delta=1e-12, msg=text)

    def test_constant_folding(self):
        d = differentiate(parse("3 * x"))
        self.assertIs(d.kind, NodeKind.CONSTANT)
        self.assertEqual(d.payload, 3.0)
        self.assertFalse(has_variable(differentiate(parse("x"))))

    def test_non_differentiable(self):
        with self.assertRaises(NonDifferentiableError):
            differentiate(parse("gamma(x)"))
        with self.assertRaises(NonDifferentiableError):
            differentiate(parse("mlf(0.5, x)"))
        with self.assertRaises(NonDifferentiableError):
            differentiate(parse("pow(0, x)"))
        self.assertEqual(evaluate(differentiate(parse("gamma(2) * x")), 1.0), 1.0)

    def test_fuzzed_against_finite_differences(self):
        rng = make_rng(2)
        checked = 0
        for _ in range(300):
            node = parse(_random_expr(rng, 3))
            d = differentiate(node)
            for x in (0.6, 1.0, 1.4):
                exact = evaluate(d, x)
                approx = _central_difference(node, x)
                scale = max(1.0, abs(exact))
                self.assertLess(abs(exact - approx) / scale, 1e-5, to_text(node))
                checked += 1
        self.assertEqual(checked, 900)

    def test_helpers(self):
        x = parse("x")
        self.assertEqual(product(constant(1.0), x), x)
        self.assertEqual(quotient(constant(6.0), constant(3.0)).payload, 2.0)


if __name__ == "__main__":
    unittest.main()
