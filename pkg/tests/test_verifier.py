import unittest

import numpy as np

from mirrormass.scattering import MirrorModel
from mirrormass.verifier import DEFAULT_TOLERANCES, SUITES, CheckResult, Verifier


class TestVerifier(unittest.TestCase):
    def check_suite_passes(self, suite, model):
        results = Verifier(model).run(suite)
        self.assertTrue(results)
        for result in results:
            with self.subTest(suite=suite, check=result.name):
                self.assertEqual(result.suite, suite)
                self.assertTrue(
                    result.passed, msg=f"{result.name}: {result.residual} >= {result.threshold}"
                )

    def test_unitarity_suite(self):
        for omega_c in [1.0, 0.2, 50.0]:
            self.check_suite_passes("unitarity", MirrorModel(omega_c))

    def test_closed_form_suite(self):
        self.check_suite_passes("closedform", MirrorModel(1.0))

    def test_asymptote_suite(self):
        self.check_suite_passes("asymptotes", MirrorModel(2.0, hbar=0.5))

    def test_limit_suite(self):
        self.check_suite_passes("limits", MirrorModel(1.0))

    def test_dispersion_suite_invariants(self):
        results = Verifier(MirrorModel(1.0), steps=2000).run("dispersion")
        by_name = {result.name: result for result in results}
        self.assertEqual(
            set(by_name),
            {
                "max_speed",
                "dispersion_residual",
                "max_step_ratio",
                "constant_force_velocity",
                "newtonian_discrepancy",
                "noise_fidelity",
                "mass_mean_zscore",
                "momentum_drift_zscore",
            },
        )
        for name, result in by_name.items():
            with self.subTest(name=name):
                self.assertTrue(result.passed, msg=f"{result.residual} >= {result.threshold}")

    def test_dispersion_suite_is_reproducible(self):
        verifier = Verifier(MirrorModel(1.0), steps=2000)
        first = {result.name: result.residual for result in verifier.run("dispersion")}
        second = {result.name: result.residual for result in verifier.run("dispersion")}
        self.assertEqual(first, second)

    def test_unknown_suite(self):
        with self.assertRaisesRegex(ValueError, "Unknown suite"):
            Verifier(MirrorModel(1.0)).run("everything")

    def test_suite_names(self):
        self.assertEqual(
            SUITES, ("unitarity", "closedform", "asymptotes", "limits", "dispersion")
        )

    def test_tolerance_override(self):
        verifier = Verifier(MirrorModel(1.0), tolerances={"delay_identity": 1e-300})
        self.assertEqual(verifier.tolerances["delay_identity"], 1e-300)
        self.assertEqual(
            verifier.tolerances["unitarity_residual"], DEFAULT_TOLERANCES["unitarity_residual"]
        )
        results = {result.name: result for result in verifier.run("unitarity")}
        self.assertFalse(results["delay_identity"].passed)
        self.assertTrue(results["unitarity_residual"].passed)

    def test_invalid_overrides(self):
        for tolerances in [{"no_such_check": 1.0}, {"spot_value": 0.0}, {"spot_value": -1.0}]:
            with self.subTest(tolerances=tolerances):
                with self.assertRaises(ValueError):
                    Verifier(MirrorModel(1.0), tolerances=tolerances)

    def test_check_result(self):
        self.assertTrue(CheckResult("limits", "one_sidedness", 0.0, 1e-300).passed)
        self.assertFalse(CheckResult("limits", "one_sidedness", 1e-300, 1e-300).passed)

    def test_report(self):
        results = [
            CheckResult("unitarity", "unitarity_residual", 1e-16, 1e-12),
            CheckResult("unitarity", "delay_at_zero", 1.0, 1e-15),
        ]
        df_report = Verifier.report(results)
        self.assertEqual(
            list(df_report.columns), ["suite", "check", "residual", "threshold", "passed"]
        )
        self.assertEqual(df_report["check"].tolist(), ["unitarity_residual", "delay_at_zero"])
        self.assertEqual(df_report["passed"].tolist(), [True, False])
        self.assertTrue(np.issubdtype(df_report["residual"].dtype, np.floating))
