import math
import unittest
from dataclasses import replace

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from mirrormass.dynamics import (
    EnsembleEstimate,
    SimulationConfig,
    Trajectory,
    TrajectoryState,
    estimate_spectrum,
    mass_mean_statistic,
    momentum_drift,
    nonrelativistic_comparison,
    periodogram_fit,
    predicted_momentum_variance,
    run_ensemble,
    run_trajectory,
    step,
    synthesize_noise,
)
from mirrormass.scattering import MirrorModel
from mirrormass.spectra import SpectrumComponent, band_induced_mass


def flat_spectrum(omegas):
    return np.ones_like(omegas)


class TestSynthesizeNoise(unittest.TestCase):
    def setUp(self):
        self.model = MirrorModel(1.0)

    def test_same_seed_same_series(self):
        first = synthesize_noise(self.model, "f1f1", 1024, 0.01, seed=7)
        second = synthesize_noise(self.model, "f1f1", 1024, 0.01, seed=7)
        assert_array_equal(first.samples, second.samples)

    def test_different_seeds_differ(self):
        first = synthesize_noise(self.model, "field", 1024, 0.01, seed=1)
        second = synthesize_noise(self.model, "field", 1024, 0.01, seed=2)
        self.assertFalse(np.array_equal(first.samples, second.samples))

    def test_series_attributes(self):
        series = synthesize_noise(self.model, "field", 256, 0.5, seed=0, band=(0.1, 2.0), scale=3.0)
        self.assertEqual(len(series), 256)
        self.assertEqual(series.band, (0.1, 2.0))
        self.assertEqual(series.scale, 3.0)
        self.assertIs(series.component, SpectrumComponent.FIELD)
        self.assertAlmostEqual(series.nyquist, 2.0 * math.pi)
        assert_allclose(series.times[:3], [0.0, 0.5, 1.0])

    def test_zero_mean(self):
        series = synthesize_noise(self.model, "field", 4096, 0.05, seed=3)
        self.assertAlmostEqual(float(np.mean(series.samples)), 0.0, places=12)

    def test_scale_is_linear(self):
        unit = synthesize_noise(self.model, "field", 512, 0.1, seed=5)
        scaled = synthesize_noise(self.model, "field", 512, 0.1, seed=5, scale=2.5)
        assert_allclose(scaled.samples, 2.5 * unit.samples, rtol=1e-14)

    def test_empty_band_gives_silence(self):
        series = synthesize_noise(self.model, "f1f1", 512, 0.1, seed=0, band=(0.0, 0.0))
        assert_array_equal(series.samples, 0.0)

    def test_variance_of_flat_spectrum(self):
        # a flat one-sided spectrum of one up to Nyquist has variance 1 / (2 dt)
        dt = 0.1
        series = synthesize_noise(self.model, "f1f1", 2**16, dt, seed=11, spectrum=flat_spectrum)
        self.assertAlmostEqual(float(np.var(series.samples)) * 2.0 * dt, 1.0, delta=0.05)

    def test_welch_estimate_recovers_flat_spectrum(self):
        series = synthesize_noise(self.model, "f1f1", 2**16, 0.1, seed=4, spectrum=flat_spectrum)
        omegas, estimate = estimate_spectrum(series)
        inside = (omegas > 1.0) & (omegas < 0.8 * series.nyquist)
        self.assertAlmostEqual(float(np.mean(estimate[inside])), 0.5, delta=0.025)

    def test_periodogram_fit_of_field_noise(self):
        series = synthesize_noise(self.model, "field", 2**16, 0.05, seed=9, band=(0.0, 2.0))
        ratio = periodogram_fit(series, band=(0.3, 1.5))
        self.assertIsNotNone(ratio)
        self.assertAlmostEqual(ratio, 1.0, delta=0.1)

    def test_periodogram_fit_without_bins(self):
        series = synthesize_noise(self.model, "f1f1", 256, 0.1, seed=0, band=(0.0, 0.0))
        self.assertIsNone(periodogram_fit(series))

    def test_invalid_arguments(self):
        for kwargs in [
            {"n": 1000, "dt": 0.1},
            {"n": 1, "dt": 0.1},
            {"n": 1024, "dt": 0.0},
            {"n": 1024, "dt": -1.0},
            {"n": 1024, "dt": 0.1, "band": (2.0, 1.0)},
            {"n": 1024, "dt": 0.1, "band": (-1.0, 1.0)},
        ]:
            with self.subTest(**kwargs):
                with self.assertRaises(ValueError):
                    synthesize_noise(self.model, "f1f1", seed=0, **kwargs)

    def test_negative_target_spectrum(self):
        with self.assertRaises(ValueError):
            synthesize_noise(
                self.model, "f1f1", 256, 0.1, seed=0, spectrum=lambda omegas: -np.ones_like(omegas)
            )

    def test_unknown_component(self):
        with self.assertRaises(ValueError):
            synthesize_noise(self.model, "f2f2", 256, 0.1, seed=0)


class TestStep(unittest.TestCase):
    def test_single_step(self):
        state = TrajectoryState(t=0.0, q=0.0, p=0.0, m=1.0)
        new_state = step(state, force=3.0, dm_next=0.0, dt=0.5, m_bare=2.0)
        self.assertEqual(new_state.t, 0.5)
        self.assertEqual(new_state.p, 1.5)
        self.assertEqual(new_state.m, 2.0)
        self.assertAlmostEqual(new_state.velocity, 0.6, places=15)
        self.assertAlmostEqual(new_state.q, 0.3, places=15)
        self.assertAlmostEqual(new_state.energy, 2.5, places=15)

    def test_speed_stays_below_one(self):
        state = TrajectoryState(t=0.0, q=0.0, p=0.0, m=1.0)
        for _ in range(100):
            state = step(state, force=1e6, dm_next=0.0, dt=0.1, m_bare=1.0)
            self.assertLess(abs(state.velocity), 1.0)

    def test_invalid_steps(self):
        state = TrajectoryState(t=0.0, q=0.0, p=0.0, m=1.0)
        with self.assertRaises(ValueError):
            step(state, 0.0, 0.0, dt=0.0, m_bare=1.0)
        with self.assertRaises(ValueError):
            step(state, 0.0, dm_next=-2.0, dt=0.1, m_bare=1.0)
        with self.assertRaises(ValueError):
            step(TrajectoryState(t=0.0, q=0.0, p=0.0, m=0.0), 0.0, 0.0, dt=0.1, m_bare=1.0)


class TestSimulationConfig(unittest.TestCase):
    def setUp(self):
        self.model = MirrorModel(1.0)

    def test_defaults(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=100)
        self.assertEqual(cfg.band[0], 0.0)
        self.assertAlmostEqual(cfg.band[1], 10.0)
        self.assertEqual(cfg.noise_length, 128)
        self.assertIs(cfg.force_component, SpectrumComponent.F1F1)

    def test_noise_length_is_power_of_two(self):
        for steps, expected in [(1, 2), (127, 128), (128, 256), (1000, 1024)]:
            with self.subTest(steps=steps):
                cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=steps)
                self.assertEqual(cfg.noise_length, expected)

    def test_force_component_from_string(self):
        cfg = SimulationConfig(self.model, 1.0, 0.01, 10, force_component="f0f0")
        self.assertIs(cfg.force_component, SpectrumComponent.F0F0)

    def test_field_seed_is_derived(self):
        cfg = SimulationConfig(self.model, 1.0, 0.01, 10, seed=3)
        self.assertNotEqual(cfg.field_seed, cfg.seed)
        self.assertEqual(cfg.field_seed, replace(cfg).field_seed)
        self.assertNotEqual(cfg.field_seed, replace(cfg, seed=4).field_seed)

    def test_invalid_values(self):
        for kwargs in [
            {"m_bare": 0.0},
            {"m_bare": -1.0},
            {"dt": 0.0},
            {"steps": 0},
            {"steps": 1.5},
            {"seed": -1},
            {"record_every": 0},
            {"noise_scale": -1.0},
            {"q0": math.inf},
            {"force_component": "mass"},
            {"noise_band": (2.0, 1.0)},
            {"noise_band": (0.0, 20.0)},
        ]:
            with self.subTest(**kwargs):
                arguments = {"m_bare": 1.0, "dt": 0.01, "steps": 10}
                arguments.update(kwargs)
                with self.assertRaises(ValueError):
                    SimulationConfig(self.model, **arguments)

    def test_to_dict(self):
        cfg = SimulationConfig(self.model, 2.0, 0.01, 10, noise_band=(0.0, 5.0), mass_channel=True)
        flat = cfg.to_dict()
        self.assertEqual(flat["mass_bare"], 2.0)
        self.assertEqual(flat["band"], [0.0, 5.0])
        self.assertEqual(flat["force_component"], "f1f1")
        self.assertTrue(flat["mass_channel"])


class TestRunTrajectory(unittest.TestCase):
    def setUp(self):
        self.model = MirrorModel(1.0)

    def test_constant_force(self):
        force, mass, dt, steps = 2.0, 1.5, 0.01, 500
        cfg = SimulationConfig(self.model, m_bare=mass, dt=dt, steps=steps)
        trajectory, diagnostics = run_trajectory(cfg, force=np.full(steps, force))

        times = trajectory.t
        assert_allclose(trajectory.p, force * times, rtol=1e-12, atol=1e-12)
        expected = force * times / np.sqrt(mass**2 + (force * times) ** 2)
        assert_allclose(trajectory.v, expected, rtol=1e-12)
        self.assertLess(diagnostics.max_speed, 1.0)
        self.assertLess(diagnostics.dispersion_residual, 1e-12)
        self.assertIsNone(diagnostics.momentum_variance_predicted)
        self.assertIsNone(diagnostics.mass_mean)

    def test_free_motion(self):
        cfg = SimulationConfig(self.model, m_bare=2.0, dt=0.01, steps=200, p0=1.0, q0=0.5)
        trajectory, _ = run_trajectory(cfg, force=np.zeros(200))
        velocity = 1.0 / math.sqrt(5.0)
        assert_allclose(trajectory.v, velocity, rtol=1e-14)
        assert_allclose(trajectory.q, 0.5 + velocity * trajectory.t, rtol=1e-12)

    def test_zero_noise_scale(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=100, noise_scale=0.0)
        trajectory, diagnostics = run_trajectory(cfg)
        assert_array_equal(trajectory.p, 0.0)
        assert_array_equal(trajectory.q, 0.0)
        self.assertEqual(diagnostics.momentum_variance_predicted, 0.0)

    def test_empty_band(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=100, noise_band=(0.0, 0.0))
        trajectory, diagnostics = run_trajectory(cfg)
        assert_array_equal(trajectory.p, 0.0)
        self.assertIsNone(diagnostics.periodogram_ratio)

    def test_same_seed_same_trajectory(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=300, seed=5, mass_channel=True)
        first, _ = run_trajectory(cfg)
        second, _ = run_trajectory(cfg)
        assert_array_equal(first.q, second.q)
        assert_array_equal(first.m, second.m)

    def test_mass_channel(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=300, mass_channel=True)
        trajectory, diagnostics = run_trajectory(cfg)
        self.assertTrue(np.all(trajectory.m >= 1.0))
        self.assertGreater(diagnostics.mass_mean, 0.0)
        self.assertAlmostEqual(
            diagnostics.mass_mean_predicted, band_induced_mass(self.model, 0.0, 10.0)
        )

    def test_explicit_mass_series(self):
        steps = 50
        dm = np.linspace(0.0, 1.0, steps + 1)
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=steps)
        trajectory, _ = run_trajectory(cfg, force=np.ones(steps), dm=dm)
        assert_allclose(trajectory.m, 1.0 + dm)

    def test_record_every(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=100, record_every=10)
        full_cfg = replace(cfg, record_every=1)
        force = np.linspace(-1.0, 1.0, 100)
        sparse, _ = run_trajectory(cfg, force=force)
        full, _ = run_trajectory(full_cfg, force=force)
        self.assertEqual(len(sparse), 11)
        assert_array_equal(sparse.q, full.q[::10])
        assert_allclose(sparse.t, np.arange(11) * 0.1)

    def test_trajectory_frame(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=10)
        trajectory, _ = run_trajectory(cfg, force=np.ones(10))
        df = trajectory.to_frame()
        self.assertEqual(list(df.columns), ["t", "q", "p", "m", "v", "e"])
        self.assertEqual(len(df), 11)
        state = trajectory.state(-1)
        self.assertAlmostEqual(state.velocity, df["v"].iloc[-1], places=15)

    def test_invalid_inputs(self):
        cfg = SimulationConfig(self.model, m_bare=1.0, dt=0.01, steps=10)
        with self.assertRaises(ValueError):
            run_trajectory(cfg, force=np.ones(5))
        with self.assertRaises(ValueError):
            run_trajectory(cfg, force=np.ones(10), dm=np.zeros(10))
        with self.assertRaises(ValueError):
            run_trajectory(cfg, force=np.ones(10), dm=np.full(11, -2.0))
        with self.assertRaises(FloatingPointError):
            run_trajectory(cfg, force=np.full(10, np.nan))

    def test_newtonian_limit(self):
        steps = 1000
        cfg = SimulationConfig(self.model, m_bare=100.0, dt=0.01, steps=steps)
        comparison = nonrelativistic_comparison(cfg, force=np.ones(steps))
        # |p| / m stays below 0.1, so the discrepancy is of relative order 1e-2
        self.assertLess(comparison.max_velocity_discrepancy, 0.01 * 0.1)
        self.assertGreater(comparison.max_velocity_discrepancy, 0.0)
        self.assertTrue(np.all(np.abs(comparison.newtonian.v) >= np.abs(comparison.relativistic.v)))


class TestEnsemble(unittest.TestCase):
    def setUp(self):
        self.cfg = SimulationConfig(MirrorModel(1.0), m_bare=1.0, dt=0.01, steps=200)

    def test_ensemble_matches_single_runs(self):
        results = run_ensemble(self.cfg, [3, 4], n_jobs=1)
        self.assertEqual(len(results), 2)
        single, _ = run_trajectory(replace(self.cfg, seed=4))
        assert_array_equal(results[1][0].p, single.p)

    def test_parallel_matches_serial(self):
        serial = run_ensemble(self.cfg, [0, 1, 2], n_jobs=1)
        parallel = run_ensemble(self.cfg, [0, 1, 2], n_jobs=2)
        for (first, _), (second, _) in zip(serial, parallel):
            assert_array_equal(first.q, second.q)

    def test_momentum_drift_of_constant_momentum(self):
        times = np.linspace(0.0, 1.0, 20)
        trajectories = [
            Trajectory(t=times, q=times, p=np.full(20, p), m=np.ones(20), v=np.zeros(20))
            for p in [0.1, 0.2, 0.3]
        ]
        drift = momentum_drift(trajectories)
        self.assertAlmostEqual(drift.mean, 0.0, places=12)
        self.assertEqual(drift.size, 3)
        self.assertEqual(drift.predicted, 0.0)

    def test_momentum_drift_of_linear_growth(self):
        times = np.linspace(0.0, 2.0, 50)
        trajectories = [
            Trajectory(
                t=times, q=times, p=np.sqrt(slope * times), m=np.ones(50), v=np.zeros(50)
            )
            for slope in [1.0, 2.0, 3.0]
        ]
        drift = momentum_drift(trajectories, late_fraction=0.4)
        self.assertAlmostEqual(drift.mean, 2.0, places=10)
        self.assertAlmostEqual(drift.standard_error, 1.0 / math.sqrt(3.0), places=10)

    def test_momentum_drift_validation(self):
        with self.assertRaises(ValueError):
            momentum_drift([], late_fraction=0.0)

    def test_mass_statistic(self):
        cfg = replace(self.cfg, mass_channel=True)
        diagnostics = [item for _, item in run_ensemble(cfg, [0, 1, 2])]
        statistic = mass_mean_statistic(diagnostics)
        self.assertEqual(statistic.size, 3)
        self.assertEqual(statistic.predicted, diagnostics[0].mass_mean_predicted)
        self.assertGreater(statistic.mean, 0.0)

    def test_mass_statistic_needs_mass_channel(self):
        diagnostics = [item for _, item in run_ensemble(self.cfg, [0, 1])]
        with self.assertRaises(ValueError):
            mass_mean_statistic(diagnostics)

    def test_z_score(self):
        self.assertEqual(EnsembleEstimate(1.0, 0.5, 4, predicted=0.0).z_score, 2.0)
        self.assertEqual(EnsembleEstimate(1.0, 0.0, 4, predicted=1.0).z_score, 0.0)
        self.assertEqual(EnsembleEstimate(1.0, 0.0, 4).z_score, math.inf)


class TestPredictedMomentumVariance(unittest.TestCase):
    def test_empty_band(self):
        self.assertEqual(predicted_momentum_variance(MirrorModel(1.0), "f1f1", (1.0, 1.0)), 0.0)

    def test_low_frequency_band(self):
        # C_F1F1 / omega^2 is close to omega / (3 pi) at low frequency
        low, high = 0.0, 0.01
        expected = high**2 / (12.0 * math.pi**2)
        self.assertAlmostEqual(
            predicted_momentum_variance(MirrorModel(1.0), "f1f1", (low, high)) / expected,
            1.0,
            places=3,
        )
