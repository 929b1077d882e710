"""
Property batteries that check the library against analytic results.

Each suite returns one :class:`CheckResult` per property, holding the
measured residual and the threshold it has to stay below. Thresholds can
be overridden by name, which is what ``mirrormass verify --tol`` does.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from .dynamics import (
    SimulationConfig,
    mass_mean_statistic,
    momentum_drift,
    nonrelativistic_comparison,
    periodogram_fit,
    run_ensemble,
    run_trajectory,
    synthesize_noise,
)
from .quadrature import QuadratureConfig
from .scattering import (
    MirrorModel,
    amplitudes,
    determinant,
    phase_shift,
    reflection_delay,
    unitarity_residual,
)
from .spectra import (
    SpectrumComponent,
    SpectrumMethod,
    alpha_kernel,
    evaluate_spectrum,
    force_spectrum,
    low_freq_asymptote,
    mass_spectrum,
    mass_spectrum_small_x_series,
    mass_spectrum_via_convolution,
    mean_induced_mass,
    variance_relation_check,
)
from .utils.fitting import fit_power_law

SUITES = ("unitarity", "closedform", "asymptotes", "limits", "dispersion")

DEFAULT_TOLERANCES: Dict[str, float] = {
    # unitarity
    "unitarity_residual": 1e-12,
    "determinant_modulus": 1e-12,
    "phase_shift_consistency": 1e-12,
    "delay_identity": 1e-6,
    "delay_at_zero": 1e-15,
    # closedform
    "closed_vs_quadrature": 1e-8,
    "spot_value": 1e-6,
    "series_vs_quadrature": 1e-6,
    "energy_mass_consistency": 1e-8,
    "convolution_vs_quadrature": 1e-8,
    "kernel_identity": 1e-12,
    "mean_mass_quadrature_vs_closed": 1e-8,
    "variance_relation": 1e-6,
    # asymptotes
    "mass_asymptote_at_0.05": 1e-3,
    "mass_asymptote_at_0.01": 1e-4,
    "f0f0_exponent": 0.01,
    "f1f1_exponent": 0.01,
    "mean_mass_log_growth": 1e-6,
    # limits
    "one_sidedness": 1e-300,
    "perfect_reflection_f1f1": 1e-3,
    "perfect_reflection_mass": 1e-3,
    "vanishing_delay_mass": 1e-6,
    # dispersion
    "max_speed": 1.0,
    "dispersion_residual": 1e-9,
    "max_step_ratio": 1.0,
    "constant_force_velocity": 1e-6,
    "newtonian_discrepancy": 1e-3,
    "noise_fidelity": 0.05,
    "mass_mean_zscore": 3.0,
    "momentum_drift_zscore": 3.0,
}


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of a single property check.

    Parameters
    ----------
    suite : str
        The suite the check belongs to.
    name : str
        The check name, also used to override its threshold.
    residual : float
        The measured deviation.
    threshold : float
        The check passes if ``residual < threshold``.
    """

    suite: str
    name: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        """Whether the residual is below the threshold."""
        return bool(self.residual < self.threshold)


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


class Verifier:
    """
    Run the property suites for one mirror model.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration. Frequencies in every suite are chosen
        relative to its cut-off.
    tolerances : Optional[Dict[str, float]]
        Threshold overrides by check name.
        Defaults to ``None``.
    quad_cfg : Optional[QuadratureConfig]
        Integration tolerances.
        Defaults to ``None``.
    steps : int
        Number of steps of the long simulator run.
        Defaults to ``10**6``.
    n_jobs : int
        Number of joblib workers for the seed ensembles.
        Defaults to 1.
    logger : Optional[logging.Logger]
        A logger object. If ``None``, the module logger is used.
        Defaults to ``None``.

    Raises
    ------
    ValueError
        If a tolerance override names an unknown check or is not positive.
    """

    def __init__(
        self,
        model: MirrorModel,
        tolerances: Optional[Dict[str, float]] = None,
        quad_cfg: Optional[QuadratureConfig] = None,
        steps: int = 10**6,
        n_jobs: int = 1,
        logger: Optional[logging.Logger] = None,
    ):
        self.model = model
        self.quad_cfg = quad_cfg if quad_cfg is not None else QuadratureConfig()
        self.steps = int(steps)
        self.n_jobs = n_jobs
        self.logger = logger if logger else logging.getLogger(__name__)

        self.tolerances = dict(DEFAULT_TOLERANCES)
        for name, value in (tolerances or {}).items():
            if name not in DEFAULT_TOLERANCES:
                raise ValueError(
                    f"Unknown check {name!r}. Valid names: {', '.join(DEFAULT_TOLERANCES)}."
                )
            if not float(value) > 0:
                raise ValueError(f"The tolerance for {name} must be positive, got {value}.")
            self.tolerances[name] = float(value)

        self._suites: Dict[str, Callable[[], List[CheckResult]]] = {
            "unitarity": self.check_unitarity,
            "closedform": self.check_closed_forms,
            "asymptotes": self.check_asymptotes,
            "limits": self.check_limits,
            "dispersion": self.check_dynamics,
        }

    def _result(self, suite: str, name: str, residual: float) -> CheckResult:
        result = CheckResult(suite, name, float(residual), self.tolerances[name])
        verdict = "PASS" if result.passed else "FAIL"
        self.logger.info(f"{verdict} {suite}/{name}: {result.residual:.3e} < {result.threshold:.3e}")
        return result

    def _omega(self, x) -> np.ndarray:
        return self.model.omega_c * np.asarray(x, dtype=float)

    def check_unitarity(self) -> List[CheckResult]:
        """Check unitarity, the determinant and the reflection delay."""
        positive = self._omega(np.logspace(-3, 3, 1000))
        omegas = np.concatenate([-positive[::-1], positive])
        det = determinant(self.model, omegas)

        samples = self._omega(np.logspace(-2, 2, 100))
        steps = 1e-4 * samples
        derivative = (
            phase_shift(self.model, samples + steps) - phase_shift(self.model, samples - steps)
        ) / (2.0 * steps)
        delay = reflection_delay(self.model, samples)

        return [
            self._result(
                "unitarity",
                "unitarity_residual",
                np.max(unitarity_residual(amplitudes(self.model, omegas))),
            ),
            self._result("unitarity", "determinant_modulus", np.max(np.abs(np.abs(det) - 1.0))),
            self._result(
                "unitarity",
                "phase_shift_consistency",
                np.max(np.abs(np.exp(1j * phase_shift(self.model, omegas)) - det)),
            ),
            self._result(
                "unitarity", "delay_identity", np.max(np.abs(0.5 * derivative - delay) / delay)
            ),
            self._result(
                "unitarity",
                "delay_at_zero",
                abs(reflection_delay(self.model, 0.0) * self.model.omega_c - 1.0),
            ),
        ]

    def check_closed_forms(self) -> List[CheckResult]:
        """Compare every closed form with an independent quadrature."""
        model, cfg = self.model, self.quad_cfg
        hbar2 = model.hbar**2

        grid = self._omega(np.logspace(-3, 3, 400))
        worst = max(
            _relative(
                mass_spectrum(model, w, SpectrumMethod.CLOSED_FORM),
                mass_spectrum(model, w, SpectrumMethod.QUADRATURE, cfg),
            )
            for w in grid
        )

        spot_exact = (
            hbar2
            * model.omega_c
            / (2.0 * math.pi)
            * 0.8
            * (1.5 * math.log(2.0) - 0.25 * math.pi)
        )
        spot = mass_spectrum(model, model.omega_c, SpectrumMethod.QUADRATURE, cfg)

        series_point = 0.005 * model.omega_c
        series_error = _relative(
            mass_spectrum_small_x_series(model, series_point),
            mass_spectrum(model, series_point, SpectrumMethod.QUADRATURE, cfg),
        )

        energy_mass = max(
            _relative(
                force_spectrum(model, SpectrumComponent.F0F0, w, cfg),
                w * w * mass_spectrum(model, w, SpectrumMethod.QUADRATURE, cfg),
            )
            for w in self._omega([0.1, 1.0, 10.0])
        )

        convolution = max(
            _relative(
                mass_spectrum_via_convolution(model, w, cfg),
                mass_spectrum(model, w, SpectrumMethod.QUADRATURE, cfg),
            )
            for w in self._omega(np.logspace(-2, 2, 20))
        )

        rng = np.random.default_rng(0)
        omega1 = self._omega(10.0 ** rng.uniform(-3, 3, 10_000))
        omega2 = self._omega(10.0 ** rng.uniform(-3, 3, 10_000))
        kernel = np.max(
            np.abs(
                alpha_kernel(model, SpectrumComponent.F0F0, omega1, omega2)
                - (omega1 + omega2) ** 2
                * reflection_delay(model, omega1)
                * reflection_delay(model, omega2)
            )
        )

        mean_mass = max(
            _relative(
                mean_induced_mass(model, cut, cfg, SpectrumMethod.QUADRATURE),
                mean_induced_mass(model, cut, cfg, SpectrumMethod.CLOSED_FORM),
            )
            for cut in self._omega([1.0, 10.0, 1e3])
        )

        variance = 0.0
        for cut in self._omega([10.0, 100.0]):
            spectral, analytic = variance_relation_check(model, cut, cfg)
            variance = max(variance, abs(spectral / analytic - 1.0))

        return [
            self._result("closedform", "closed_vs_quadrature", worst),
            self._result("closedform", "spot_value", _relative(spot, spot_exact)),
            self._result("closedform", "series_vs_quadrature", series_error),
            self._result("closedform", "energy_mass_consistency", energy_mass),
            self._result("closedform", "convolution_vs_quadrature", convolution),
            self._result("closedform", "kernel_identity", kernel),
            self._result("closedform", "mean_mass_quadrature_vs_closed", mean_mass),
            self._result("closedform", "variance_relation", variance),
        ]

    def check_asymptotes(self) -> List[CheckResult]:
        """Check the low-frequency power laws and the logarithmic mean mass."""
        model, cfg = self.model, self.quad_cfg
        results = []
        for x, name in ((0.05, "mass_asymptote_at_0.05"), (0.01, "mass_asymptote_at_0.01")):
            w = x * model.omega_c
            ratio = mass_spectrum(model, w, SpectrumMethod.QUADRATURE, cfg) / low_freq_asymptote(
                model, SpectrumComponent.MASS, w
            )
            results.append(self._result("asymptotes", name, abs(ratio - 1.0)))

        band = self._omega(np.logspace(-3, -2, 20))
        for component, exponent, name in (
            (SpectrumComponent.F0F0, 5.0, "f0f0_exponent"),
            (SpectrumComponent.F1F1, 3.0, "f1f1_exponent"),
        ):
            values = [force_spectrum(model, component, w, cfg) for w in band]
            fit = fit_power_law(band, values)
            results.append(self._result("asymptotes", name, abs(fit.slope - exponent)))

        decade = model.hbar * model.omega_c / (2.0 * math.pi) * math.log(10.0)
        masses = [mean_induced_mass(model, cut, cfg) for cut in self._omega([1e3, 1e4, 1e5])]
        growth = max(_relative(upper - lower, decade) for lower, upper in zip(masses, masses[1:]))
        results.append(self._result("asymptotes", "mean_mass_log_growth", growth))
        return results

    def check_limits(self) -> List[CheckResult]:
        """Check one-sidedness and the perfect-reflection limit."""
        model, cfg = self.model, self.quad_cfg
        hbar2 = model.hbar**2

        one_sided = 0.0
        for component in SpectrumComponent:
            for w in self._omega([-10.0, -1.0, -1e-3, 0.0]):
                one_sided = max(one_sided, abs(evaluate_spectrum(model, component, w, cfg=cfg)[0]))

        # a frequency four decades below the cut-off
        w = 1e-4 * model.omega_c
        f1f1 = force_spectrum(model, SpectrumComponent.F1F1, w, cfg) / (
            hbar2 * w**3 / (3.0 * math.pi)
        )
        mass = (
            mass_spectrum(model, w, SpectrumMethod.QUADRATURE, cfg)
            * model.omega_c**2
            * 6.0
            * math.pi
            / (hbar2 * w**3)
        )

        # at fixed frequency the mass spectrum falls as the cut-off grows
        stiff = MirrorModel(omega_c=1e4 * model.omega_c, hbar=model.hbar)
        vanishing = mass_spectrum(stiff, model.omega_c, SpectrumMethod.CLOSED_FORM) / (
            mass_spectrum(model, model.omega_c, SpectrumMethod.CLOSED_FORM)
        )

        return [
            self._result("limits", "one_sidedness", one_sided),
            self._result("limits", "perfect_reflection_f1f1", abs(f1f1 - 1.0)),
            self._result("limits", "perfect_reflection_mass", abs(mass - 1.0)),
            self._result("limits", "vanishing_delay_mass", vanishing),
        ]

    def check_dynamics(self) -> List[CheckResult]:
        """Check the simulator invariants and the noise statistics."""
        model = self.model
        omega_c = model.omega_c
        results = []

        dt = 0.01 / omega_c
        long_run = SimulationConfig(
            model=model, m_bare=model.hbar * omega_c, dt=dt, steps=self.steps, seed=0
        )
        self.logger.info(f"Simulating {self.steps} steps of force noise.")
        _, diagnostics = run_trajectory(long_run)
        results.append(self._result("dispersion", "max_speed", diagnostics.max_speed))
        results.append(
            self._result("dispersion", "dispersion_residual", diagnostics.dispersion_residual)
        )
        results.append(self._result("dispersion", "max_step_ratio", diagnostics.max_step_ratio))

        constant = SimulationConfig(
            model=model, m_bare=1.0, dt=1e-3, steps=1000, noise_scale=0.0
        )
        trajectory, _ = run_trajectory(constant, force=np.ones(1000), dm=np.zeros(1001))
        t_end = trajectory.t[-1]
        exact = t_end / math.sqrt(1.0 + t_end * t_end)
        results.append(
            self._result(
                "dispersion", "constant_force_velocity", _relative(trajectory.v[-1], exact)
            )
        )

        weak_force = 0.01
        comparison = nonrelativistic_comparison(
            constant, force=np.full(1000, weak_force), dm=np.zeros(1001)
        )
        u = comparison.newtonian.v[-1]
        v = comparison.relativistic.v[-1]
        results.append(
            self._result(
                "dispersion", "newtonian_discrepancy", abs(((u - v) / v) / (0.5 * u * u) - 1.0)
            )
        )

        noise = synthesize_noise(
            model, SpectrumComponent.F1F1, 2**18, 0.05 / omega_c, seed=0, cfg=self.quad_cfg
        )
        ratio = periodogram_fit(noise, band=(0.2 * omega_c, 5.0 * omega_c), nperseg=1024)
        results.append(self._result("dispersion", "noise_fidelity", abs(ratio - 1.0)))

        ensemble_cfg = SimulationConfig(
            model=model,
            m_bare=model.hbar * omega_c,
            dt=0.05 / omega_c,
            steps=4095,
            mass_channel=True,
            noise_band=(0.0, 2.0 * omega_c),
        )
        self.logger.info("Running a 64-seed ensemble with the mass channel.")
        ensemble = run_ensemble(ensemble_cfg, range(64), n_jobs=self.n_jobs)
        statistic = mass_mean_statistic([item[1] for item in ensemble])
        results.append(self._result("dispersion", "mass_mean_zscore", statistic.z_score))

        drift = momentum_drift([item[0] for item in ensemble])
        results.append(self._result("dispersion", "momentum_drift_zscore", drift.z_score))
        return results

    def run(self, suite: str = "all") -> List[CheckResult]:
        """
        Run one suite or all of them.

        Parameters
        ----------
        suite : str
            One of :data:`SUITES` or ``"all"``.
            Defaults to ``"all"``.

        Returns
        -------
        results : List[CheckResult]
            The checks in the order they were run.

        Raises
        ------
        ValueError
            If ``suite`` is unknown.
        """
        if suite == "all":
            names = SUITES
        elif suite in self._suites:
            names = (suite,)
        else:
            raise ValueError(f"Unknown suite {suite!r}. Choose from: {', '.join(SUITES)}, all.")

        results: List[CheckResult] = []
        for name in names:
            self.logger.info(f"Running the {name} suite.")
            results.extend(self._suites[name]())
        return results

    @staticmethod
    def report(results: List[CheckResult]) -> pd.DataFrame:
        """
        Convert check results into a report frame.

        Parameters
        ----------
        results : List[CheckResult]
            The results to include.

        Returns
        -------
        df_report : pandas.DataFrame
            One row per check with the columns ``suite``, ``check``,
            ``residual``, ``threshold`` and ``passed``.
        """
        return pd.DataFrame(
            {
                "suite": [result.suite for result in results],
                "check": [result.name for result in results],
                "residual": [result.residual for result in results],
                "threshold": [result.threshold for result in results],
                "passed": [result.passed for result in results],
            }
        )
