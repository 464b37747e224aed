import math
import unittest

from psifrac import catalog
from psifrac.catalog import Kind, apply, list_presets, names, resolve
from psifrac.error import (
    CosineZeroError,
    InvalidParameterError,
    MissingParameterError,
    UnknownNameError,
)
from psifrac.operand import coerce
from psifrac.psi import make_preset


UNIT = (0.0, 1.0)


class TestResolve(unittest.TestCase):

    def test_registry(self):
        listed = names()
        self.assertEqual(listed, sorted(listed))
        for name in ("riemann_liouville", "hadamard", "prabhakar", "cassar", "caputo_riesz"):
            self.assertIn(name, listed)
        self.assertEqual(len(listed), 25)

    def test_errors(self):
        with self.assertRaises(UnknownNameError):
            resolve("grunwald")
        with self.assertRaises(MissingParameterError):
            resolve("katugampola")
        with self.assertRaises(InvalidParameterError):
            resolve("hadamard", {"rho": 2.0})
        with self.assertRaises(InvalidParameterError):
            resolve("katugampola", {"rho": math.inf})

    def test_missing_form(self):
        with self.assertRaises(InvalidParameterError):
            resolve("caputo").pipeline(Kind.INTEGRAL)
        self.assertEqual(resolve("kober", {"eta": 0.0}).kinds, (Kind.INTEGRAL,))

    def test_binds_params(self):
        preset = resolve("katugampola", {"rho": 2.0})
        self.assertEqual(preset.params, {"rho": 2.0})
        self.assertEqual(preset.integral.psi_kind, "pow:rho")

    def test_list_presets(self):
        rows = {row.name: row for row in list_presets()}
        self.assertEqual(rows["prabhakar"].kinds, ("integral", "derivative"))
        self.assertEqual(rows["prabhakar"].parameters, ("beta", "gamma", "omega", "rho"))
        self.assertEqual(rows["riesz"].parameters, ("L",))
        self.assertIn("psi(x) = ln x", rows["hadamard"].citation)


class TestIntegrals(unittest.TestCase):

    def test_hadamard(self):
        result = apply(resolve("hadamard"), "integral", 1.0, "1", math.e, domain=(1.0, math.e))
        self.assertAlmostEqual(result.value, 1.0, delta=1e-12)

    def test_erdelyi_kober(self):
        preset = resolve("erdelyi_kober", {"sigma": 1.0, "eta": 0.0})
        result = apply(preset, "integral", 0.5, "x", 1.0, domain=UNIT)
        self.assertAlmostEqual(result.value, 0.7522527780636750, delta=1e-10)

    def test_kober_and_erdelyi(self):
        kober = apply(resolve("kober", {"eta": 0.0}), "integral", 0.5, "1", 1.0)
        self.assertAlmostEqual(kober.value, 1.1283791670955126, delta=1e-10)
        erdelyi = apply(
            resolve("erdelyi", {"sigma": 1.0, "eta": 0.0}), "integral", 0.5, "1", 1.0,
        )
        self.assertAlmostEqual(erdelyi.value, kober.value, delta=1e-10)

    def test_katugampola_rho_one(self):
        rl = apply(resolve("riemann_liouville"), "integral", 0.6, "cos(x)", 0.8, domain=UNIT)
        kat = apply(resolve("katugampola", {"rho": 1.0}), "integral", 0.6, "cos(x)", 0.8, domain=UNIT)
        self.assertAlmostEqual(kat.value, rl.value, delta=1e-10)

        rl_d = apply(resolve("riemann_liouville"), "derivative", 0.6, "cos(x)", 0.8, domain=UNIT)
        kat_d = apply(
            resolve("katugampola", {"rho": 1.0}), "derivative", 0.6, "cos(x)", 0.8, domain=UNIT,
        )
        self.assertAlmostEqual(kat_d.value, rl_d.value, delta=1e-10)

    def test_generalized_rho_reduces(self):
        # kappa = -rho(alpha + eta), beta = 0 is the Erdelyi-Kober integral
        params = {"rho": 2.0, "eta": 0.5, "kappa": -2.0 * 1.0, "beta": 0.0}
        general = apply(resolve("generalized_rho", params), "integral", 0.5, "exp(x)", 0.7, domain=UNIT)
        ek = apply(
            resolve("erdelyi_kober", {"sigma": 2.0, "eta": 0.5}), "integral", 0.5, "exp(x)", 0.7,
            domain=UNIT,
        )
        self.assertAlmostEqual(general.value, ek.value, delta=1e-10)

    def test_prabhakar_gamma_zero(self):
        params = {"beta": 0.5, "gamma": 0.0, "omega": -1.0}
        prab = apply(resolve("prabhakar", params), "integral", 0.5, "cos(x)", 0.8, domain=UNIT)
        rl = apply(resolve("riemann_liouville"), "integral", 0.5, "cos(x)", 0.8, domain=UNIT)
        self.assertAlmostEqual(prab.value, rl.value, delta=1e-8)

    def test_chen_base(self):
        chen = apply(resolve("chen", {"c": 0.5}), "integral", 1.0, "1", 1.0)
        self.assertAlmostEqual(chen.value, 0.5, delta=1e-12)

    def test_riesz_symmetry(self):
        alpha = 0.5
        riesz = apply(resolve("riesz"), "integral", alpha, "exp(-x^2)", 0.0)
        liouville = apply(resolve("liouville"), "integral", alpha, "exp(-x^2)", 0.0)
        weyl = apply(resolve("weyl"), "integral", alpha, "exp(-x^2)", 0.0)
        self.assertAlmostEqual(liouville.value, weyl.value, delta=1e-7)
        self.assertAlmostEqual(
            riesz.value, (liouville.value + weyl.value) / (2.0 * math.cos(math.pi * alpha / 2.0)),
            delta=1e-12,
        )
        self.assertNotIn(catalog.NOTE_TRUNCATION, riesz.notes)

    def test_feller_weights(self):
        alpha = 0.5
        feller = apply(resolve("feller", {"theta": 0.25}), "integral", alpha, "exp(-x^2)", 0.3)
        liouville = apply(resolve("liouville"), "integral", alpha, "exp(-x^2)", 0.3)
        weyl = apply(resolve("weyl"), "integral", alpha, "exp(-x^2)", 0.3)
        # C_- = sin(pi/2) / sin(pi/4), C_+ = sin(3 pi/2) / sin(pi/4)
        c = math.sqrt(2.0)
        self.assertAlmostEqual(feller.value, c * liouville.value - c * weyl.value, delta=1e-12)
        with self.assertRaises(InvalidParameterError):
            apply(resolve("feller", {"theta": 1.5}), "integral", alpha, "exp(-x^2)", 0.3)

    def test_cosine_zero(self):
        with self.assertRaises(CosineZeroError):
            apply(resolve("riesz"), "integral", 1.0, "exp(-x^2)", 0.0)

    def test_truncation_note(self):
        with self.assertLogs("psifrac.catalog", level="WARNING"):
            result = apply(resolve("liouville"), "integral", 0.5, "1", 0.0)
        self.assertIn(catalog.NOTE_TRUNCATION, result.notes)
        self.assertGreater(result.err_est, 0.1)

    def test_window_length(self):
        short = apply(resolve("liouville", {"L": 10.0}), "integral", 1.0, "exp(x)", 0.0)
        self.assertAlmostEqual(short.value, 1.0 - math.exp(-10.0), delta=1e-8)

    def test_errors(self):
        with self.assertRaises(InvalidParameterError):
            apply(resolve("hadamard"), "integral", 0.0, "1", 2.0, domain=(1.0, math.e))
        with self.assertRaises(InvalidParameterError):
            op = coerce("x", make_preset("identity", (), UNIT))
            apply(resolve("riemann_liouville"), "integral", 0.5, op, 0.5, domain=UNIT)
        with self.assertRaises(InvalidParameterError):
            apply(resolve("liouville", {"L": -1.0}), "integral", 0.5, "1", 0.0)


class TestDerivatives(unittest.TestCase):

    def test_caputo_constant(self):
        result = apply(resolve("caputo"), "derivative", 0.5, "3", 0.7, domain=UNIT)
        self.assertAlmostEqual(result.value, 0.0, delta=1e-12)

    def test_psi_caputo_matches_caputo_hadamard(self):
        psi = make_preset("log", (), (1.0, math.e))
        given = apply(resolve("psi_caputo"), "derivative", 0.4, "x^2", 2.0, psi=psi)
        hadamard = apply(
            resolve("caputo_hadamard"), "derivative", 0.4, "x^2", 2.0, domain=(1.0, math.e),
        )
        self.assertAlmostEqual(given.value, hadamard.value, delta=1e-12)

    def test_psi_required(self):
        with self.assertRaises(MissingParameterError):
            apply(resolve("psi_riemann_liouville"), "derivative", 0.4, "x", 0.5)

    def test_jumarie(self):
        # RL derivative of x
        result = apply(resolve("jumarie"), "derivative", 0.5, "1 + x", 1.0)
        self.assertAlmostEqual(result.value, 1.1283791670955126, delta=1e-8)

    def test_hilfer_types(self):
        for beta in (0.0, 1.0):
            free = apply(
                resolve("hilfer_hadamard", {"beta": beta}), "derivative", 0.5, "x",
                2.0, domain=(1.0, math.e),
            )
            fixed_name = "hadamard" if beta == 0.0 else "caputo_hadamard"
            fixed = apply(resolve(fixed_name), "derivative", 0.5, "x", 2.0, domain=(1.0, math.e))
            self.assertAlmostEqual(free.value, fixed.value, delta=1e-12)

    def test_katugampola_multiplier(self):
        kat = apply(
            resolve("hilfer_katugampola", {"rho": 2.0, "beta": 1.0}), "derivative", 0.5,
            "x^2", 1.0, domain=UNIT,
        )
        caputo = apply(
            resolve("caputo_katugampola", {"rho": 2.0}), "derivative", 0.5, "x^2", 1.0,
            domain=UNIT,
        )
        self.assertAlmostEqual(kat.value, caputo.value, delta=1e-12)
        self.assertAlmostEqual(kat.value, math.sqrt(2.0) * 1.1283791670955126, delta=1e-8)

    def test_prabhakar_needs_fraction(self):
        preset = resolve("prabhakar", {"rho": 0.5, "gamma": 0.0, "omega": -1.0})
        with self.assertRaises(InvalidParameterError):
            apply(preset, "derivative", 1.0, "x", 0.5, domain=UNIT)

    def test_prabhakar_gamma_zero_is_rl(self):
        # gamma = 0 leaves the plain kernel u^(n-alpha-1) / Gamma(n-alpha)
        preset = resolve("prabhakar", {"rho": 0.5, "gamma": 0.0, "omega": -1.0})
        prab = apply(preset, "derivative", 0.5, "exp(x)", 0.6, domain=UNIT)
        rl = apply(resolve("riemann_liouville"), "derivative", 0.5, "exp(x)", 0.6, domain=UNIT)
        self.assertAlmostEqual(prab.value, rl.value, delta=1e-7)

    def test_weyl_and_cassar(self):
        weyl = apply(resolve("weyl"), "derivative", 0.5, "exp(-x)", 0.0)
        cassar = apply(resolve("cassar"), "derivative", 0.5, "exp(-x)", 0.0)
        # right-side derivative of e^(-x) over [x, inf) is e^(-x)
        self.assertAlmostEqual(weyl.value, 1.0, delta=1e-6)
        self.assertAlmostEqual(cassar.value, weyl.value, delta=1e-6)
        self.assertGreaterEqual(cassar.err_est, abs(cassar.value - weyl.value))

    def test_liouville_caputo(self):
        # left derivative of e^x over (-inf, x] is e^x
        result = apply(resolve("liouville_caputo"), "derivative", 0.5, "exp(x)", 0.0)
        self.assertAlmostEqual(result.value, 1.0, delta=1e-6)

    def test_caputo_riesz_cosine_zero(self):
        with self.assertRaises(CosineZeroError):
            apply(resolve("caputo_riesz"), "derivative", 1.0, "x", 0.5, domain=UNIT)


if __name__ == "__main__":
    unittest.main()
