import math
import unittest

import numpy as np

from mirrormass.quadrature import (
    NonConvergence,
    NonFiniteSample,
    QuadratureConfig,
    QuadratureError,
    integrate,
    integrate_to_cutoff,
)


class TestQuadratureConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = QuadratureConfig()
        self.assertEqual(cfg.rel_tol, 1e-10)
        self.assertEqual(cfg.abs_tol, 1e-14)
        self.assertEqual(cfg.max_depth, 50)

    def test_invalid_values(self):
        for kwargs in [
            {"rel_tol": 0.0},
            {"rel_tol": -1e-3},
            {"abs_tol": -1.0},
            {"max_depth": 0},
            {"max_depth": 2.5},
        ]:
            with self.subTest(**kwargs):
                with self.assertRaises(ValueError):
                    QuadratureConfig(**kwargs)

    def test_tolerance(self):
        cfg = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-3)
        self.assertEqual(cfg.tolerance(0.0), 1e-3)
        self.assertEqual(cfg.tolerance(-1e4), 1e-2)


class TestIntegrate(unittest.TestCase):
    def test_polynomials_are_exact_in_one_panel(self):
        for degree in range(14):
            with self.subTest(degree=degree):
                result = integrate(lambda x: x**degree, 0.0, 1.0)
                self.assertAlmostEqual(result.value, 1.0 / (degree + 1), places=14)
                self.assertEqual(result.evaluations, 15)

    def test_smooth_integrands(self):
        cases = [
            (np.sin, 0.0, math.pi, 2.0),
            (np.exp, -1.0, 2.0, math.exp(2.0) - math.exp(-1.0)),
            (lambda x: 1.0 / (1.0 + x**2), 0.0, 1e3, math.atan(1e3)),
        ]
        for f, a, b, expected in cases:
            with self.subTest(a=a, b=b):
                result = integrate(f, a, b)
                self.assertAlmostEqual(result.value / expected, 1.0, places=9)
                self.assertLessEqual(result.error_estimate, 1e-10 * abs(result.value) + 1e-14)

    def test_constant_scalar_return_is_broadcast(self):
        result = integrate(lambda x: 3.0, -1.0, 1.0)
        self.assertAlmostEqual(result.value, 6.0, places=14)

    def test_empty_interval(self):
        calls = []
        result = integrate(lambda x: calls.append(x) or x, 2.0, 2.0)
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.error_estimate, 0.0)
        self.assertEqual(result.evaluations, 0)
        self.assertEqual(calls, [])

    def test_invalid_limits(self):
        for a, b in [(1.0, 0.0), (0.0, math.inf), (-math.inf, 0.0), (math.nan, 1.0)]:
            with self.subTest(a=a, b=b):
                with self.assertRaises(ValueError):
                    integrate(np.cos, a, b)

    def test_results_are_reproducible(self):
        def f(x):
            return np.sqrt(x) * np.cos(10 * x)

        first = integrate(f, 0.0, 3.0)
        second = integrate(f, 0.0, 3.0)
        self.assertEqual(first, second)

    def test_non_convergence(self):
        cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=0.0, max_depth=3)
        with self.assertRaises(NonConvergence) as context:
            integrate(np.sqrt, 0.0, 1.0, cfg)
        self.assertAlmostEqual(context.exception.value, 2.0 / 3.0, places=3)
        self.assertGreater(context.exception.error_estimate, 0.0)

    def test_non_finite_sample(self):
        with self.assertRaises(NonFiniteSample) as context:
            integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)
        self.assertTrue(0.0 <= context.exception.abscissa <= 1.0)

    def test_infinite_sample(self):
        with self.assertRaises(NonFiniteSample):
            integrate(lambda x: 1.0 / (x - 0.5), 0.0, 1.0)

    def test_errors_are_arithmetic_errors(self):
        self.assertTrue(issubclass(NonConvergence, QuadratureError))
        self.assertTrue(issubclass(NonFiniteSample, QuadratureError))
        self.assertTrue(issubclass(QuadratureError, ArithmeticError))


def lorentzian(center, width):
    def f(x):
        return width / ((x - center) ** 2 + width**2)

    return f


def lorentzian_integral(center, width, a, b):
    return math.atan((b - center) / width) - math.atan((a - center) / width)


def lorentzian_product(first, second):
    f, g = lorentzian(*first), lorentzian(*second)

    def h(x):
        return f(x) * g(x)

    return h


# (center, width) pairs; the narrow ones sit far from the ends of [0, 2 center]
LORENTZIANS = [
    (0.3, 1e-3),
    (0.3, 1e-2),
    (1.0, 1e-1),
    (7.5, 1e-2),
    (999.0, 1e-3),
    (999.0, 1e-2),
]

PRODUCTS = [
    ((1.0, 0.1), (1.5, 0.2)),
    ((0.3, 1e-2), (0.31, 1e-2)),
    ((2.0, 1.0), (5.0, 0.5)),
]


class TestQuadratureInvariants(unittest.TestCase):
    cfg = QuadratureConfig(rel_tol=1e-8)
    reference_cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=0.0)

    def assertWithinEstimates(self, difference, *results):
        bound = sum(result.error_estimate for result in results)
        self.assertLessEqual(abs(difference), bound + 1e-15 * max(abs(r.value) for r in results))

    def test_error_estimate_bounds_lorentzians(self):
        for center, width in LORENTZIANS:
            with self.subTest(center=center, width=width):
                exact = lorentzian_integral(center, width, 0.0, 2.0 * center)
                result = integrate(lorentzian(center, width), 0.0, 2.0 * center, self.cfg)
                self.assertWithinEstimates(result.value - exact, result)
                self.assertLess(abs(result.value - exact), 1e-7 * exact)

    def test_error_estimate_bounds_lorentzians_to_cutoff(self):
        for center, width in LORENTZIANS:
            with self.subTest(center=center, width=width):
                exact = lorentzian_integral(center, width, 0.0, 2.0 * center)
                result = integrate_to_cutoff(lorentzian(center, width), 2.0 * center, self.cfg)
                self.assertWithinEstimates(result.value - exact, result)

    def test_error_estimate_bounds_lorentzian_products(self):
        for first, second in PRODUCTS:
            with self.subTest(first=first, second=second):
                h = lorentzian_product(first, second)
                b = 2.0 * first[0]
                result = integrate(h, 0.0, b, self.cfg)
                reference = integrate(h, 0.0, b, self.reference_cfg)
                self.assertWithinEstimates(result.value - reference.value, result, reference)

    def test_additivity(self):
        integrands = [(lorentzian(*pair), 2.0 * pair[0]) for pair in LORENTZIANS] + [
            (lorentzian_product(first, second), 2.0 * first[0]) for first, second in PRODUCTS
        ]
        for index, (f, b) in enumerate(integrands):
            for fraction in [0.37, 0.5, 0.9]:
                with self.subTest(integrand=index, fraction=fraction):
                    c = fraction * b
                    whole = integrate(f, 0.0, b, self.cfg)
                    left = integrate(f, 0.0, c, self.cfg)
                    right = integrate(f, c, b, self.cfg)
                    self.assertWithinEstimates(
                        left.value + right.value - whole.value, whole, left, right
                    )

    def test_linearity(self):
        alpha, beta = 2.5, -0.75
        for (first, second), b in zip(PRODUCTS, [3.0, 0.6, 10.0]):
            with self.subTest(first=first, second=second):
                f, g = lorentzian(*first), lorentzian(*second)

                def combined(x):
                    return alpha * f(x) + beta * g(x)

                result_f = integrate(f, 0.0, b, self.cfg)
                result_g = integrate(g, 0.0, b, self.cfg)
                result = integrate(combined, 0.0, b, self.cfg)
                difference = result.value - (alpha * result_f.value + beta * result_g.value)
                bound = (
                    result.error_estimate
                    + abs(alpha) * result_f.error_estimate
                    + abs(beta) * result_g.error_estimate
                )
                self.assertLessEqual(abs(difference), bound + 1e-15 * abs(result.value))


class TestIntegrateToCutoff(unittest.TestCase):
    def test_matches_integrate(self):
        def f(x):
            return x**2 * np.exp(-x)

        self.assertEqual(integrate_to_cutoff(f, 5.0), integrate(f, 0.0, 5.0))

    def test_invalid_cutoffs(self):
        for cutoff in [0.0, -1.0, math.inf, math.nan]:
            with self.subTest(cutoff=cutoff):
                with self.assertRaises(ValueError):
                    integrate_to_cutoff(np.cos, cutoff)
