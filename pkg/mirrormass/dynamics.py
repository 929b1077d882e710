"""
Noise synthesis and relativistic motion of a mirror in vacuum.

Vacuum spectra are one-sided and cannot be the spectrum of a classical
stationary process, so the synthesized series target the symmetrized
spectrum ``(C[omega] + C[-omega]) / 2``. A series of length ``n`` is built by
drawing independent gaussian Fourier coefficients on the ``rfft`` bins and
transforming back; the series is periodic with period ``n dt``.

The mirror is advanced with a kick-drift scheme in momentum variables:
the momentum receives the force, the mass is refreshed from the optional
field channel and the position moves with ``v = p / sqrt(p^2 + m^2)``, so
``|v| < 1`` holds for every step without any clamping. The force series is
precomputed and does not react to the motion of the mirror.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib.parallel import Parallel, delayed
from numpy.typing import ArrayLike
from scipy import signal
from tqdm import tqdm

from .quadrature import QuadratureConfig, integrate
from .scattering import MirrorModel
from .spectra import (
    FORCE_COMPONENTS,
    SpectrumComponent,
    SpectrumMethod,
    as_component,
    band_induced_mass,
    evaluate_spectrum,
)
from .utils.fitting import fit_line
from .utils.logging import tqdm_joblib

# number of frequencies at which the target spectrum is evaluated exactly
# before log-log interpolation onto the FFT bins
TABLE_POINTS = 256

# closed forms are used wherever a component has one
_SYNTHESIS_METHODS: Dict[SpectrumComponent, SpectrumMethod] = {
    SpectrumComponent.MASS: SpectrumMethod.CLOSED_FORM,
}

SpectrumFunction = Callable[[np.ndarray], np.ndarray]


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _next_power_of_two(n: int) -> int:
    return 1 << max(1, int(n - 1).bit_length())


@dataclass(frozen=True)
class NoiseSeries:
    """
    A synthesized realization of a stationary gaussian process.

    Parameters
    ----------
    dt : float
        Sampling step.
    samples : numpy.ndarray
        The series values.
    component : SpectrumComponent
        The spectrum the series was generated from.
    model : MirrorModel
        The mirror configuration of that spectrum.
    seed : int
        The seed of the random generator.
    band : Tuple[float, float]
        Frequency window outside of which the spectrum was set to zero.
    scale : float
        Factor applied to the samples after synthesis.
        Defaults to 1.0.
    """

    dt: float
    samples: np.ndarray
    component: SpectrumComponent
    model: MirrorModel
    seed: int
    band: Tuple[float, float]
    scale: float = 1.0

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        """Sampling times ``k dt``."""
        return self.dt * np.arange(len(self.samples))

    @property
    def nyquist(self) -> float:
        """The Nyquist angular frequency ``pi / dt``."""
        return math.pi / self.dt


@lru_cache(maxsize=32)
def _spectrum_table(
    model: MirrorModel,
    component: SpectrumComponent,
    low: float,
    high: float,
    cfg: Optional[QuadratureConfig],
) -> Tuple[np.ndarray, np.ndarray]:
    method = _SYNTHESIS_METHODS.get(component)
    grid = np.geomspace(low, high, TABLE_POINTS)
    table = np.array([evaluate_spectrum(model, component, w, method, cfg)[0] for w in grid])
    return grid, table


def _tabulated_spectrum(
    model: MirrorModel,
    component: SpectrumComponent,
    omegas: np.ndarray,
    cfg: Optional[QuadratureConfig],
) -> np.ndarray:
    """Evaluate the one-sided spectrum at positive ``omegas`` via a table."""
    if len(omegas) == 0:
        return np.zeros(0)

    low, high = float(omegas.min()), float(omegas.max())
    if len(omegas) <= TABLE_POINTS or low == high:
        method = _SYNTHESIS_METHODS.get(component)
        return np.array([evaluate_spectrum(model, component, w, method, cfg)[0] for w in omegas])

    grid, table = _spectrum_table(model, component, low, high, cfg)
    if np.all(table > 0):
        return np.exp(np.interp(np.log(omegas), np.log(grid), np.log(table)))
    return np.interp(omegas, grid, table)


def synthesize_noise(
    model: MirrorModel,
    component: Union[str, SpectrumComponent],
    n: int,
    dt: float,
    seed: int,
    band: Optional[Tuple[float, float]] = None,
    scale: float = 1.0,
    cfg: Optional[QuadratureConfig] = None,
    spectrum: Optional[SpectrumFunction] = None,
) -> NoiseSeries:
    """
    Draw a gaussian series whose spectrum is the symmetrized target spectrum.

    Each interior ``rfft`` bin receives a complex coefficient with variance
    ``n S_k / dt``, where ``S_k`` is the symmetrized spectrum ``C / 2`` at the
    bin frequency, and the zero and Nyquist bins receive real coefficients.
    The zero-frequency bin is always empty, so the series has no mean.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        The target spectrum.
    n : int
        Number of samples, a power of two.
    dt : float
        Sampling step, strictly positive.
    seed : int
        Seed of ``numpy.random.default_rng``.
    band : Optional[Tuple[float, float]]
        Angular frequency window ``(omega_min, omega_max)``; bins outside
        of it are empty. If ``None``, every bin up to Nyquist is used.
        Defaults to ``None``.
    scale : float
        Factor applied to the samples.
        Defaults to 1.0.
    cfg : Optional[QuadratureConfig]
        Integration tolerances used to tabulate the spectrum.
        Defaults to ``None``.
    spectrum : Optional[Callable[[numpy.ndarray], numpy.ndarray]]
        A one-sided spectrum to use instead of the one of ``component``.
        Defaults to ``None``.

    Returns
    -------
    series : NoiseSeries
        The synthesized series, identical for identical arguments.

    Raises
    ------
    ValueError
        If ``n`` is not a power of two, ``dt`` is not positive, the band is
        invalid or the component is unknown.
    """
    component = as_component(component)
    if not _is_power_of_two(int(n)) or int(n) != n:
        raise ValueError(f"The number of samples must be a power of two, got {n}.")
    if not (math.isfinite(dt) and dt > 0):
        raise ValueError(f"The time step must be strictly positive, got {dt}.")
    n = int(n)

    omegas = 2.0 * math.pi * np.fft.rfftfreq(n, dt)
    low, high = (0.0, omegas[-1]) if band is None else (float(band[0]), float(band[1]))
    if not 0 <= low <= high:
        raise ValueError(f"Invalid frequency band [{low}, {high}].")

    mask = (omegas > 0) & (omegas >= low) & (omegas <= high)
    one_sided = np.zeros_like(omegas)
    if spectrum is not None:
        one_sided[mask] = np.asarray(spectrum(omegas[mask]), dtype=float)
    else:
        one_sided[mask] = _tabulated_spectrum(model, component, omegas[mask], cfg)
    if np.any(one_sided < 0):
        raise ValueError("The target spectrum must be nonnegative.")
    symmetrized = 0.5 * one_sided

    rng = np.random.default_rng(seed)
    real = rng.standard_normal(len(omegas))
    imag = rng.standard_normal(len(omegas))

    coefficients = np.sqrt(n * symmetrized / (2.0 * dt)) * (real + 1j * imag)
    coefficients[0] = math.sqrt(n * symmetrized[0] / dt) * real[0]
    coefficients[-1] = math.sqrt(n * symmetrized[-1] / dt) * real[-1]

    samples = scale * np.fft.irfft(coefficients, n)
    return NoiseSeries(
        dt=float(dt),
        samples=samples,
        component=component,
        model=model,
        seed=seed,
        band=(low, high),
        scale=scale,
    )


def default_nperseg(n: int) -> int:
    """Return the Welch segment length used when none is given."""
    return int(min(1024, max(16, n // 8)))


def estimate_spectrum(
    series: NoiseSeries, nperseg: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Estimate the symmetrized spectrum of a series with Welch's method.

    Parameters
    ----------
    series : NoiseSeries
        The series to analyze.
    nperseg : Optional[int]
        Segment length; segments overlap by half. If ``None``,
        :func:`default_nperseg` is used.
        Defaults to ``None``.

    Returns
    -------
    omegas : numpy.ndarray
        Angular frequencies of the estimate.
    estimate : numpy.ndarray
        Estimate of the symmetrized spectrum in the normalization of
        :func:`synthesize_noise`, i.e. half the one-sided density, with the
        series scale factor divided out.
    """
    nperseg = default_nperseg(len(series)) if nperseg is None else int(nperseg)
    freqs, psd = signal.welch(
        series.samples / series.scale if series.scale else series.samples,
        fs=1.0 / series.dt,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend="constant",
        scaling="density",
    )
    return 2.0 * math.pi * freqs, 0.5 * psd


def periodogram_fit(
    series: NoiseSeries,
    band: Optional[Tuple[float, float]] = None,
    nperseg: Optional[int] = None,
    cfg: Optional[QuadratureConfig] = None,
) -> Optional[float]:
    """
    Compare the Welch estimate of a series with its target spectrum.

    Parameters
    ----------
    series : NoiseSeries
        The series to check.
    band : Optional[Tuple[float, float]]
        Angular frequency window of the comparison. If ``None``, the window
        runs from the larger of twice the lower synthesis edge and eight
        Welch bins up to half of the upper synthesis edge.
        Defaults to ``None``.
    nperseg : Optional[int]
        Welch segment length.
        Defaults to ``None``.
    cfg : Optional[QuadratureConfig]
        Integration tolerances for the target spectrum.
        Defaults to ``None``.

    Returns
    -------
    ratio : Optional[float]
        Band-averaged estimate divided by the band-averaged target, or
        ``None`` if the window holds no Welch frequency or the target
        vanishes there.
    """
    nperseg = default_nperseg(len(series)) if nperseg is None else int(nperseg)
    omegas, estimate = estimate_spectrum(series, nperseg)

    if band is None:
        resolution = 2.0 * math.pi / (nperseg * series.dt)
        band = (max(2.0 * series.band[0], 8.0 * resolution), 0.5 * series.band[1])
    mask = (omegas >= band[0]) & (omegas <= band[1]) & (omegas > 0)
    if not np.any(mask):
        return None

    method = _SYNTHESIS_METHODS.get(series.component)
    target = np.array(
        [
            0.5 * evaluate_spectrum(series.model, series.component, w, method, cfg)[0]
            for w in omegas[mask]
        ]
    )
    if not target.sum() > 0:
        return None
    return float(estimate[mask].sum() / target.sum())


@dataclass(frozen=True)
class TrajectoryState:
    """
    Instantaneous state of the mirror.

    Parameters
    ----------
    t : float
        Time.
    q : float
        Position.
    p : float
        Spatial momentum.
    m : float
        Instantaneous mass, bare plus induced.
    """

    t: float
    q: float
    p: float
    m: float

    @property
    def energy(self) -> float:
        """The energy ``sqrt(p^2 + m^2)``."""
        return math.sqrt(self.p * self.p + self.m * self.m)

    @property
    def velocity(self) -> float:
        """The velocity ``p / sqrt(p^2 + m^2)``, always smaller than one in magnitude."""
        return self.p / self.energy


def _advance(
    q: float, p: float, force: float, dm_next: float, dt: float, m_bare: float
) -> Tuple[float, float, float, float]:
    p = p + force * dt
    m = m_bare + dm_next
    if not m > 0:
        raise ValueError(f"The mass must stay positive, got m = {m}.")
    v = p / math.sqrt(p * p + m * m)
    return q + dt * v, p, m, v


def step(
    state: TrajectoryState, force: float, dm_next: float, dt: float, m_bare: float
) -> TrajectoryState:
    """
    Advance the mirror by one time step.

    Parameters
    ----------
    state : TrajectoryState
        The current state.
    force : float
        The force acting during the step.
    dm_next : float
        The induced mass at the end of the step.
    dt : float
        The time step, strictly positive.
    m_bare : float
        The bare mass.

    Returns
    -------
    state : TrajectoryState
        The state at ``t + dt``.

    Raises
    ------
    ValueError
        If ``dt`` or the current mass is not positive, or if the new mass
        ``m_bare + dm_next`` is not positive.
    """
    if not dt > 0:
        raise ValueError(f"The time step must be strictly positive, got {dt}.")
    if not state.m > 0:
        raise ValueError(f"The mass must be positive, got m = {state.m}.")
    q, p, m, _ = _advance(state.q, state.p, force, dm_next, dt, m_bare)
    return TrajectoryState(t=state.t + dt, q=q, p=p, m=m)


@dataclass(frozen=True)
class SimulationConfig:
    """
    Parameters of a trajectory simulation.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    m_bare : float
        The bare mass, strictly positive.
    dt : float
        The time step, strictly positive.
    steps : int
        Number of steps, at least one.
    seed : int
        Seed of the force noise; the field noise uses a seed derived from it.
        Defaults to 0.
    mass_channel : bool
        Whether the mass fluctuates as ``omega_c`` times the squared field
        on the mirror.
        Defaults to ``False``.
    noise_band : Optional[Tuple[float, float]]
        Angular frequency window of both noise channels. If ``None``, the
        window is ``(0, 0.1 / dt)``.
        Defaults to ``None``.
    q0 : float
        Initial position.
        Defaults to 0.0.
    p0 : float
        Initial momentum.
        Defaults to 0.0.
    noise_scale : float
        Factor applied to the force and to the field noise.
        Defaults to 1.0.
    record_every : int
        Keep every ``record_every``-th state in the trajectory.
        Defaults to 1.
    force_component : SpectrumComponent
        The force spectrum driving the momentum.
        Defaults to ``SpectrumComponent.F1F1``.

    Raises
    ------
    ValueError
        If any parameter is out of range or ``dt * omega_max > 0.1``.
    """

    model: MirrorModel
    m_bare: float
    dt: float
    steps: int
    seed: int = 0
    mass_channel: bool = False
    noise_band: Optional[Tuple[float, float]] = None
    q0: float = 0.0
    p0: float = 0.0
    noise_scale: float = 1.0
    record_every: int = 1
    force_component: SpectrumComponent = field(default=SpectrumComponent.F1F1)

    def __post_init__(self):
        if not (math.isfinite(self.m_bare) and self.m_bare > 0):
            raise ValueError(f"`m_bare` must be strictly positive, got {self.m_bare}.")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"`dt` must be strictly positive, got {self.dt}.")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"`steps` must be a positive integer, got {self.steps}.")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError(f"`seed` must be a nonnegative integer, got {self.seed}.")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"`record_every` must be a positive integer, got {self.record_every}.")
        if not (math.isfinite(self.noise_scale) and self.noise_scale >= 0):
            raise ValueError(f"`noise_scale` must be nonnegative, got {self.noise_scale}.")
        if not (math.isfinite(self.q0) and math.isfinite(self.p0)):
            raise ValueError("The initial position and momentum must be finite.")

        component = as_component(self.force_component)
        if component not in FORCE_COMPONENTS:
            raise ValueError(f"{component.value} is not a force spectrum.")
        object.__setattr__(self, "force_component", component)

        low, high = self.band
        if not (0 <= low <= high and math.isfinite(high)):
            raise ValueError(f"Invalid noise band [{low}, {high}].")
        if self.dt * high > 0.1 * (1.0 + 1e-12):
            raise ValueError(
                f"The time step {self.dt} does not resolve the noise band: "
                f"dt * omega_max = {self.dt * high} exceeds 0.1."
            )

    @property
    def band(self) -> Tuple[float, float]:
        """The resolved noise band."""
        if self.noise_band is None:
            return 0.0, 0.1 / self.dt
        return float(self.noise_band[0]), float(self.noise_band[1])

    @property
    def noise_length(self) -> int:
        """Length of the synthesized series: a power of two covering every step."""
        return _next_power_of_two(self.steps + 1)

    @property
    def field_seed(self) -> int:
        """Seed of the field noise, derived from ``seed``."""
        return int(np.random.SeedSequence([self.seed, 1]).generate_state(1)[0])

    def to_dict(self) -> Dict[str, object]:
        """Flatten the configuration into plain values."""
        low, high = self.band
        return {
            "omega_c": self.model.omega_c,
            "hbar": self.model.hbar,
            "mass_bare": self.m_bare,
            "dt": self.dt,
            "steps": self.steps,
            "seed": self.seed,
            "mass_channel": self.mass_channel,
            "band": [low, high],
            "q0": self.q0,
            "p0": self.p0,
            "noise_scale": self.noise_scale,
            "record_every": self.record_every,
            "force_component": self.force_component.value,
        }


@dataclass(frozen=True)
class Trajectory:
    """
    Recorded states of a trajectory in columnar form.

    Parameters
    ----------
    t, q, p, m, v : numpy.ndarray
        Time, position, momentum, mass and velocity of each recorded state.
    """

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray
    m: np.ndarray
    v: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    @property
    def e(self) -> np.ndarray:
        """The energy ``sqrt(p^2 + m^2)`` of each recorded state."""
        return np.sqrt(self.p * self.p + self.m * self.m)

    def state(self, index: int) -> TrajectoryState:
        """Return the recorded state with the given index."""
        return TrajectoryState(
            t=float(self.t[index]),
            q=float(self.q[index]),
            p=float(self.p[index]),
            m=float(self.m[index]),
        )

    def to_frame(self) -> pd.DataFrame:
        """Convert the trajectory into a frame with columns t, q, p, m, v and e."""
        return pd.DataFrame(
            {"t": self.t, "q": self.q, "p": self.p, "m": self.m, "v": self.v, "e": self.e}
        )


@dataclass(frozen=True)
class SimulationDiagnostics:
    """
    Summary statistics of a simulated trajectory.

    Values that do not apply to a run (for example mass statistics without
    the mass channel) are ``None``.
    """

    max_speed: float
    dispersion_residual: float
    max_step_ratio: float
    momentum_variance: float
    momentum_variance_predicted: Optional[float] = None
    mass_mean: Optional[float] = None
    mass_mean_predicted: Optional[float] = None
    periodogram_ratio: Optional[float] = None

    def to_dict(self) -> Dict[str, Optional[float]]:
        """Convert the diagnostics into a plain dictionary."""
        return {
            "max_speed": self.max_speed,
            "dispersion_residual": self.dispersion_residual,
            "max_step_ratio": self.max_step_ratio,
            "momentum_variance": self.momentum_variance,
            "momentum_variance_predicted": self.momentum_variance_predicted,
            "mass_mean": self.mass_mean,
            "mass_mean_predicted": self.mass_mean_predicted,
            "periodogram_ratio": self.periodogram_ratio,
        }


def predicted_momentum_variance(
    model: MirrorModel,
    component: Union[str, SpectrumComponent],
    band: Tuple[float, float],
    cfg: Optional[QuadratureConfig] = None,
) -> float:
    """
    Compute the stationary momentum variance produced by band-limited force noise.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        The force spectrum.
    band : Tuple[float, float]
        The angular frequency window of the force.
    cfg : Optional[QuadratureConfig]
        Tolerances of the inner force integrals.
        Defaults to ``None``.

    Returns
    -------
    variance : float
        ``int_band (d omega / 2 pi) C_F[omega] / omega^2``.
    """
    component = as_component(component)
    return _momentum_variance(model, component, float(band[0]), float(band[1]), cfg)


@lru_cache(maxsize=32)
def _momentum_variance(
    model: MirrorModel,
    component: SpectrumComponent,
    low: float,
    high: float,
    cfg: Optional[QuadratureConfig],
) -> float:
    if high <= low:
        return 0.0

    def integrand(omegas: np.ndarray) -> np.ndarray:
        return np.array(
            [
                evaluate_spectrum(model, component, w, None, cfg)[0] / (w * w) if w > 0 else 0.0
                for w in omegas
            ]
        ) / (2.0 * math.pi)

    return integrate(integrand, low, high, QuadratureConfig(rel_tol=1e-6)).value


def _noise_inputs(cfg: SimulationConfig) -> Tuple[NoiseSeries, Optional[NoiseSeries]]:
    length = cfg.noise_length
    force_noise = synthesize_noise(
        cfg.model,
        cfg.force_component,
        length,
        cfg.dt,
        cfg.seed,
        band=cfg.band,
        scale=cfg.noise_scale,
    )
    field_noise = None
    if cfg.mass_channel:
        field_noise = synthesize_noise(
            cfg.model,
            SpectrumComponent.FIELD,
            length,
            cfg.dt,
            cfg.field_seed,
            band=cfg.band,
            scale=cfg.noise_scale,
        )
    return force_noise, field_noise


def _integrate_trajectory(
    cfg: SimulationConfig, force: np.ndarray, dm: np.ndarray, newtonian: bool = False
) -> Tuple[Trajectory, float]:
    """Run the step loop; return the recorded trajectory and ``max |dq| / dt``."""
    every = cfg.record_every
    size = cfg.steps // every + 1
    t_rec, q_rec, p_rec, m_rec, v_rec = (np.empty(size) for _ in range(5))

    q, p = cfg.q0, cfg.p0
    m = cfg.m_bare + float(dm[0])
    if not m > 0:
        raise ValueError(f"The initial mass must be positive, got m = {m}.")
    v = p / m if newtonian else p / math.sqrt(p * p + m * m)
    t_rec[0], q_rec[0], p_rec[0], m_rec[0], v_rec[0] = 0.0, q, p, m, v

    dt = cfg.dt
    max_dq = 0.0
    record = 1
    for i in range(cfg.steps):
        if newtonian:
            p = p + float(force[i]) * dt
            m = cfg.m_bare + float(dm[i + 1])
            if not m > 0:
                raise ValueError(f"The mass must stay positive, got m = {m}.")
            v = p / m
            q_next = q + v * dt
        else:
            q_next, p, m, v = _advance(q, p, float(force[i]), float(dm[i + 1]), dt, cfg.m_bare)
        max_dq = max(max_dq, abs(q_next - q))
        q = q_next
        if (i + 1) % every == 0:
            t_rec[record], q_rec[record], p_rec[record] = (i + 1) * dt, q, p
            m_rec[record], v_rec[record] = m, v
            record += 1

    trajectory = Trajectory(t=t_rec, q=q_rec, p=p_rec, m=m_rec, v=v_rec)
    return trajectory, max_dq / dt


def _resolve_inputs(
    cfg: SimulationConfig, force: Optional[ArrayLike], dm: Optional[ArrayLike]
) -> Tuple[np.ndarray, np.ndarray, Optional[NoiseSeries], Optional[NoiseSeries]]:
    force_noise = field_noise = None
    if force is None or (dm is None and cfg.mass_channel):
        force_noise, field_noise = _noise_inputs(cfg)
    if force is not None:
        force_noise = None
    if dm is not None:
        field_noise = None

    if force is None:
        force = force_noise.samples
    force = np.asarray(force, dtype=float)
    if len(force) < cfg.steps:
        raise ValueError(f"Need at least {cfg.steps} force values, got {len(force)}.")

    if dm is None:
        if field_noise is not None:
            dm = cfg.model.omega_c * field_noise.samples**2
        else:
            dm = np.zeros(cfg.steps + 1)
    dm = np.asarray(dm, dtype=float)
    if len(dm) < cfg.steps + 1:
        raise ValueError(f"Need at least {cfg.steps + 1} mass values, got {len(dm)}.")

    if not (np.all(np.isfinite(force[: cfg.steps])) and np.all(np.isfinite(dm[: cfg.steps + 1]))):
        raise FloatingPointError("The force or mass series contains non-finite values.")
    return force, dm, force_noise, field_noise


def run_trajectory(
    cfg: SimulationConfig,
    force: Optional[ArrayLike] = None,
    dm: Optional[ArrayLike] = None,
    logger: Optional[logging.Logger] = None,
) -> Tuple[Trajectory, SimulationDiagnostics]:
    """
    Integrate the motion of the mirror driven by vacuum noise.

    Parameters
    ----------
    cfg : SimulationConfig
        The simulation parameters.
    force : Optional[ArrayLike]
        Explicit force values, one per step. If ``None``, force noise with
        the spectrum ``cfg.force_component`` is synthesized.
        Defaults to ``None``.
    dm : Optional[ArrayLike]
        Explicit induced mass values, one per state (``steps + 1``). If
        ``None``, the mass channel is synthesized when enabled and the
        induced mass is zero otherwise.
        Defaults to ``None``.
    logger : Optional[logging.Logger]
        A logger object. If ``None``, the module logger is used.
        Defaults to ``None``.

    Returns
    -------
    trajectory : Trajectory
        The recorded states.
    diagnostics : SimulationDiagnostics
        Speed, dispersion, momentum and mass statistics of the run.

    Raises
    ------
    ValueError
        If the mass becomes nonpositive or explicit inputs are too short.
    FloatingPointError
        If the inputs contain non-finite values.
    """
    logger = logger if logger else logging.getLogger(__name__)
    force, dm, force_noise, field_noise = _resolve_inputs(cfg, force, dm)

    logger.debug(f"Integrating {cfg.steps} steps with dt = {cfg.dt} and seed {cfg.seed}.")
    trajectory, step_ratio = _integrate_trajectory(cfg, force, dm)

    energy = trajectory.e
    residual = np.abs(energy * energy - trajectory.p**2 - trajectory.m**2) / (energy * energy)

    momentum_variance_predicted = mass_mean = mass_mean_predicted = periodogram_ratio = None
    if force_noise is not None:
        momentum_variance_predicted = cfg.noise_scale**2 * predicted_momentum_variance(
            cfg.model, cfg.force_component, cfg.band
        )
        periodogram_ratio = periodogram_fit(force_noise)
    if field_noise is not None:
        mass_mean = float(np.mean(dm[: cfg.steps + 1]))
        mass_mean_predicted = cfg.noise_scale**2 * band_induced_mass(cfg.model, *cfg.band)

    diagnostics = SimulationDiagnostics(
        max_speed=float(np.max(np.abs(trajectory.v))),
        dispersion_residual=float(np.max(residual)),
        max_step_ratio=float(step_ratio),
        momentum_variance=float(np.var(trajectory.p)),
        momentum_variance_predicted=momentum_variance_predicted,
        mass_mean=mass_mean,
        mass_mean_predicted=mass_mean_predicted,
        periodogram_ratio=periodogram_ratio,
    )
    logger.debug(f"Finished seed {cfg.seed}: max |v| = {diagnostics.max_speed}.")
    return trajectory, diagnostics


@dataclass(frozen=True)
class TrajectoryComparison:
    """
    A relativistic and a Newtonian trajectory driven by the same inputs.

    Parameters
    ----------
    relativistic : Trajectory
        The trajectory with ``v = p / sqrt(p^2 + m^2)``.
    newtonian : Trajectory
        The trajectory with ``v = p / m``.
    max_position_discrepancy : float
        Largest absolute position difference over the recorded states.
    max_velocity_discrepancy : float
        Largest absolute velocity difference over the recorded states.
    """

    relativistic: Trajectory
    newtonian: Trajectory
    max_position_discrepancy: float
    max_velocity_discrepancy: float


def nonrelativistic_comparison(
    cfg: SimulationConfig,
    force: Optional[ArrayLike] = None,
    dm: Optional[ArrayLike] = None,
) -> TrajectoryComparison:
    """
    Integrate the same inputs with the relativistic and the Newtonian update.

    Both integrators see identical force and mass series. For slow motion,
    ``|p| / m << 1``, the discrepancy is of relative order ``(p / m)^2``.

    Parameters
    ----------
    cfg : SimulationConfig
        The simulation parameters.
    force : Optional[ArrayLike]
        Explicit force values; synthesized if ``None``.
        Defaults to ``None``.
    dm : Optional[ArrayLike]
        Explicit induced mass values; synthesized or zero if ``None``.
        Defaults to ``None``.

    Returns
    -------
    comparison : TrajectoryComparison
        Both trajectories and their largest discrepancies.
    """
    force, dm, _, _ = _resolve_inputs(cfg, force, dm)
    relativistic, _ = _integrate_trajectory(cfg, force, dm)
    newtonian, _ = _integrate_trajectory(cfg, force, dm, newtonian=True)
    return TrajectoryComparison(
        relativistic=relativistic,
        newtonian=newtonian,
        max_position_discrepancy=float(np.max(np.abs(relativistic.q - newtonian.q))),
        max_velocity_discrepancy=float(np.max(np.abs(relativistic.v - newtonian.v))),
    )


def _run_seed(cfg: SimulationConfig, seed: int) -> Tuple[Trajectory, SimulationDiagnostics]:
    return run_trajectory(replace(cfg, seed=int(seed)))


def run_ensemble(
    cfg: SimulationConfig,
    seeds: Sequence[int],
    n_jobs: int = 1,
    silence_tqdm: bool = True,
) -> List[Tuple[Trajectory, SimulationDiagnostics]]:
    """
    Run one trajectory per seed, in parallel.

    Parameters
    ----------
    cfg : SimulationConfig
        The shared simulation parameters; only the seed changes.
    seeds : Sequence[int]
        The seeds to run.
    n_jobs : int
        Number of joblib workers.
        Defaults to 1.
    silence_tqdm : bool
        Whether to hide the progress bar.
        Defaults to ``True``.

    Returns
    -------
    results : List[Tuple[Trajectory, SimulationDiagnostics]]
        One result per seed, in the order of ``seeds``.
    """
    with tqdm_joblib(tqdm(desc="Ensemble", total=len(seeds), disable=silence_tqdm)):
        return Parallel(n_jobs=n_jobs)(delayed(_run_seed)(cfg, seed) for seed in seeds)


@dataclass(frozen=True)
class EnsembleEstimate:
    """
    An ensemble mean with its standard error.

    Parameters
    ----------
    mean : float
        Mean over the ensemble members.
    standard_error : float
        Sample standard deviation divided by the square root of the size.
    size : int
        Number of ensemble members.
    predicted : Optional[float]
        Theoretical value the mean is compared with, if any.
        Defaults to ``None``.
    """

    mean: float
    standard_error: float
    size: int
    predicted: Optional[float] = None

    @property
    def z_score(self) -> float:
        """Distance between the mean and the prediction (or zero) in standard errors."""
        reference = 0.0 if self.predicted is None else self.predicted
        if self.standard_error == 0:
            return 0.0 if self.mean == reference else math.inf
        return abs(self.mean - reference) / self.standard_error


def _ensemble_estimate(values: Sequence[float], predicted: Optional[float] = None) -> EnsembleEstimate:
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        raise ValueError("An ensemble estimate needs at least two members.")
    return EnsembleEstimate(
        mean=float(values.mean()),
        standard_error=float(values.std(ddof=1) / math.sqrt(len(values))),
        size=len(values),
        predicted=predicted,
    )


def momentum_drift(
    trajectories: Sequence[Trajectory], late_fraction: float = 0.5
) -> EnsembleEstimate:
    """
    Measure the late-time growth rate of the squared momentum.

    For each trajectory the slope of ``p^2`` against time is fitted by OLS
    over the last ``late_fraction`` of the recorded states; the ensemble mean
    of the slopes should be compatible with zero when the force spectrum
    vanishes fast enough at low frequency.

    Parameters
    ----------
    trajectories : Sequence[Trajectory]
        At least two trajectories.
    late_fraction : float
        Fraction of the recorded states forming the late window.
        Defaults to 0.5.

    Returns
    -------
    drift : EnsembleEstimate
        Mean slope and its standard error.

    Raises
    ------
    ValueError
        If ``late_fraction`` is not in ``(0, 1]`` or fewer than two
        trajectories are given.
    """
    if not 0 < late_fraction <= 1:
        raise ValueError(f"`late_fraction` must be in (0, 1], got {late_fraction}.")
    slopes = []
    for trajectory in trajectories:
        start = int(len(trajectory) * (1.0 - late_fraction))
        slopes.append(fit_line(trajectory.t[start:], trajectory.p[start:] ** 2).slope)
    return _ensemble_estimate(slopes, predicted=0.0)


def mass_mean_statistic(diagnostics: Sequence[SimulationDiagnostics]) -> EnsembleEstimate:
    """
    Average the time-averaged induced mass over an ensemble.

    Parameters
    ----------
    diagnostics : Sequence[SimulationDiagnostics]
        Diagnostics of runs with the mass channel enabled.

    Returns
    -------
    statistic : EnsembleEstimate
        Mean, standard error and the band-limited mean mass prediction.

    Raises
    ------
    ValueError
        If a run has no mass statistics or fewer than two runs are given.
    """
    if any(item.mass_mean is None for item in diagnostics):
        raise ValueError("Every run must have the mass channel enabled.")
    return _ensemble_estimate(
        [item.mass_mean for item in diagnostics], predicted=diagnostics[0].mass_mean_predicted
    )
