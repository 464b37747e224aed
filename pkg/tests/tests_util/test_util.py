import math
import unittest

from psifrac.error import InvalidParameterError
from psifrac.util.convert import format_real, parse_param, parse_params
from psifrac.util.string import ColorCode, insert_colorcode, status_label


class TestFormatReal(unittest.TestCase):

    def test_digits(self):
        self.assertEqual(format_real(1.0), "1")
        self.assertEqual(format_real(0.1), "0.10000000000000001")
        self.assertEqual(format_real(1.1283791670955126), "1.1283791670955126")

    def test_nonfinite(self):
        self.assertEqual(format_real(math.nan), "nan")
        self.assertEqual(format_real(math.inf), "inf")
        self.assertEqual(format_real(-math.inf), "-inf")


class TestParseParam(unittest.TestCase):

    def test_valid(self):
        self.assertEqual(parse_param("rho=2"), ("rho", 2.0))
        self.assertEqual(parse_param(" L = 10"), ("L", 10.0))
        self.assertEqual(parse_param("omega=-1e-3"), ("omega", -0.001))

    def test_invalid(self):
        for text in ("rho", "=2", "rho=abc", "rho=inf", "rho=nan"):
            with self.assertRaises(InvalidParameterError, msg=text):
                parse_param(text)

    def test_params(self):
        self.assertEqual(parse_params(["rho=2", "beta=0.5"]), {"rho": 2.0, "beta": 0.5})
        self.assertEqual(parse_params([]), {})
        with self.assertRaises(InvalidParameterError):
            parse_params(["rho=2", "rho=3"])


class TestString(unittest.TestCase):

    def test_insert_colorcode(self):
        self.assertEqual(
            insert_colorcode("ok", ColorCode.GREEN), "\033[32mok\033[0m",
        )
        self.assertEqual(insert_colorcode("ok", ColorCode.RED, reset=False), "\033[31mok")

    def test_status_label(self):
        self.assertEqual(status_label(True), "PASS")
        self.assertEqual(status_label(False), "FAIL")
        self.assertEqual(status_label(False, color=True), "\033[31mFAIL\033[0m")


if __name__ == "__main__":
    unittest.main()
