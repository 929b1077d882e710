"""
Vacuum correlation spectra of the force on the mirror and of its mass.

All spectra are one-sided: they vanish for ``omega <= 0``. Integrals over
frequency are carried out in units of the cut-off ``omega_c`` and the
physical prefactor is applied afterwards, so that the integrands stay of
order one over the whole range of supported frequencies.

The divergent mean induced mass is only available through functions that
take an explicit ultraviolet cut-off.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib.parallel import Parallel, delayed
from numpy.typing import ArrayLike
from tqdm import tqdm

from .quadrature import QuadratureConfig, integrate, integrate_to_cutoff
from .scattering import AmplitudePair, MirrorModel, amplitude_derivatives_at_zero, amplitudes
from .utils.logging import tqdm_joblib

# below this value of omega / omega_c the closed form loses digits to
# cancellation and the Taylor series is used instead
SERIES_THRESHOLD = 0.01


class SpectrumComponent(Enum):
    """The correlation spectra that can be computed."""

    F0F0 = "f0f0"
    F1F1 = "f1f1"
    F0F1 = "f0f1"
    MASS = "mass"
    FIELD = "field"
    P1P1 = "p1p1"


class SpectrumMethod(Enum):
    """The evaluation strategies for a spectrum."""

    QUADRATURE = "quad"
    CLOSED_FORM = "closed"
    CONVOLUTION = "conv"
    ASYMPTOTE = "asym"


FORCE_COMPONENTS: FrozenSet[SpectrumComponent] = frozenset(
    {SpectrumComponent.F0F0, SpectrumComponent.F1F1, SpectrumComponent.F0F1}
)

NONNEGATIVE_COMPONENTS: FrozenSet[SpectrumComponent] = frozenset(
    {
        SpectrumComponent.F0F0,
        SpectrumComponent.F1F1,
        SpectrumComponent.MASS,
        SpectrumComponent.FIELD,
        SpectrumComponent.P1P1,
    }
)

VALID_METHODS: Dict[SpectrumComponent, Tuple[SpectrumMethod, ...]] = {
    SpectrumComponent.F0F0: (SpectrumMethod.QUADRATURE, SpectrumMethod.ASYMPTOTE),
    SpectrumComponent.F1F1: (SpectrumMethod.QUADRATURE, SpectrumMethod.ASYMPTOTE),
    SpectrumComponent.F0F1: (SpectrumMethod.QUADRATURE,),
    SpectrumComponent.MASS: (
        SpectrumMethod.QUADRATURE,
        SpectrumMethod.CLOSED_FORM,
        SpectrumMethod.CONVOLUTION,
        SpectrumMethod.ASYMPTOTE,
    ),
    SpectrumComponent.FIELD: (SpectrumMethod.CLOSED_FORM,),
    SpectrumComponent.P1P1: (SpectrumMethod.QUADRATURE, SpectrumMethod.ASYMPTOTE),
}

DEFAULT_METHODS: Dict[SpectrumComponent, SpectrumMethod] = {
    component: methods[0] for component, methods in VALID_METHODS.items()
}


def as_component(component: Union[str, SpectrumComponent]) -> SpectrumComponent:
    """
    Convert a name such as ``"f1f1"`` into a :class:`SpectrumComponent`.

    Raises
    ------
    ValueError
        If the name does not correspond to any component.
    """
    if isinstance(component, SpectrumComponent):
        return component
    try:
        return SpectrumComponent(str(component).lower())
    except ValueError:
        choices = ", ".join(member.value for member in SpectrumComponent)
        raise ValueError(f"Unknown spectrum component {component!r}. Choose from: {choices}.")


def as_method(method: Union[str, SpectrumMethod]) -> SpectrumMethod:
    """
    Convert a name such as ``"closed"`` into a :class:`SpectrumMethod`.

    Raises
    ------
    ValueError
        If the name does not correspond to any method.
    """
    if isinstance(method, SpectrumMethod):
        return method
    try:
        return SpectrumMethod(str(method).lower())
    except ValueError:
        choices = ", ".join(member.value for member in SpectrumMethod)
        raise ValueError(f"Unknown evaluation method {method!r}. Choose from: {choices}.")


@dataclass(frozen=True)
class SpectrumSamples:
    """
    A spectrum sampled on a frequency grid.

    Parameters
    ----------
    frequencies : numpy.ndarray
        Strictly increasing frequencies.
    values : numpy.ndarray
        Spectrum values, one per frequency.
    component : SpectrumComponent
        Which spectrum was sampled.
    model : MirrorModel
        The mirror the spectrum belongs to.
    method : SpectrumMethod
        How the values were obtained.
    error_estimates : Optional[numpy.ndarray]
        Absolute error estimates of the values. Zero for closed forms.
        Defaults to ``None``.

    Raises
    ------
    ValueError
        If the frequencies are not strictly increasing, the arrays differ in
        length, a nonnegative spectrum has a negative value or a value at a
        nonpositive frequency is not zero.
    """

    frequencies: np.ndarray
    values: np.ndarray
    component: SpectrumComponent
    model: MirrorModel
    method: SpectrumMethod
    error_estimates: Optional[np.ndarray] = None

    def __post_init__(self):
        frequencies = np.asarray(self.frequencies, dtype=float).ravel()
        values = np.asarray(self.values, dtype=float).ravel()
        errors = (
            np.zeros_like(values)
            if self.error_estimates is None
            else np.asarray(self.error_estimates, dtype=float).ravel()
        )

        if not (len(frequencies) == len(values) == len(errors)):
            raise ValueError(
                f"Got {len(frequencies)} frequencies, {len(values)} values "
                f"and {len(errors)} error estimates."
            )
        if np.any(np.diff(frequencies) <= 0):
            raise ValueError("The frequencies must be strictly increasing.")
        if self.component in NONNEGATIVE_COMPONENTS and np.any(values < 0):
            raise ValueError(f"The {self.component.value} spectrum cannot be negative.")
        if np.any(values[frequencies <= 0] != 0):
            raise ValueError("Spectra must vanish at nonpositive frequencies.")

        object.__setattr__(self, "frequencies", frequencies)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "error_estimates", errors)

    def to_frame(self, scale_frequency: float = 1.0, scale_value: float = 1.0) -> pd.DataFrame:
        """
        Convert the samples into a data frame.

        Parameters
        ----------
        scale_frequency : float
            Divisor applied to the frequencies.
            Defaults to 1.0.
        scale_value : float
            Divisor applied to the values and the error estimates.
            Defaults to 1.0.

        Returns
        -------
        df : pandas.DataFrame
            Frame with the columns ``omega``, ``value`` and ``error_estimate``.
        """
        return pd.DataFrame(
            {
                "omega": self.frequencies / scale_frequency,
                "value": self.values / scale_value,
                "error_estimate": self.error_estimates / scale_value,
            }
        )


def alpha_from_amplitudes(
    component: Union[str, SpectrumComponent], pair1: AmplitudePair, pair2: AmplitudePair
) -> Union[float, np.ndarray]:
    """
    Evaluate the two-photon kernel of a force spectrum for arbitrary amplitudes.

    ``alpha00 = Re(1 - s s' - r r')``, ``alpha11 = Re(1 - s s' + r r')`` and
    ``alpha01 = 0``, where unprimed amplitudes belong to the first photon
    and primed ones to the second.

    Parameters
    ----------
    component : Union[str, SpectrumComponent]
        One of the force components.
    pair1 : AmplitudePair
        Amplitudes at the first frequency.
    pair2 : AmplitudePair
        Amplitudes at the second frequency.

    Returns
    -------
    alpha : Union[float, numpy.ndarray]
        The kernel value(s).

    Raises
    ------
    ValueError
        If ``component`` is not a force component.
    """
    component = as_component(component)
    if component not in FORCE_COMPONENTS:
        raise ValueError(f"No two-photon kernel is defined for the {component.value} spectrum.")

    s1, r1 = np.asarray(pair1.s, dtype=complex), np.asarray(pair1.r, dtype=complex)
    s2, r2 = np.asarray(pair2.s, dtype=complex), np.asarray(pair2.r, dtype=complex)
    shape = np.broadcast(s1, s2).shape

    if component is SpectrumComponent.F0F0:
        alpha = np.real(1.0 - s1 * s2 - r1 * r2)
    elif component is SpectrumComponent.F1F1:
        alpha = np.real(1.0 - s1 * s2 + r1 * r2)
    else:
        alpha = np.zeros(shape)

    alpha = np.asarray(alpha, dtype=float)
    return alpha.item() if alpha.ndim == 0 else alpha


def alpha_kernel(
    model: MirrorModel,
    component: Union[str, SpectrumComponent],
    omega1: ArrayLike,
    omega2: ArrayLike,
) -> Union[float, np.ndarray]:
    """
    Evaluate the two-photon kernel of a force spectrum for the given mirror.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        One of the force components.
    omega1 : ArrayLike
        First photon frequency (or frequencies).
    omega2 : ArrayLike
        Second photon frequency (or frequencies).

    Returns
    -------
    alpha : Union[float, numpy.ndarray]
        The kernel value(s), symmetric in the two frequencies.

    Raises
    ------
    ValueError
        If ``component`` is not a force component.
    """
    return alpha_from_amplitudes(component, amplitudes(model, omega1), amplitudes(model, omega2))


def _lorentzian(y: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + y * y)


def _force_spectrum_result(
    model: MirrorModel, component: SpectrumComponent, omega: float, cfg: QuadratureConfig
) -> Tuple[float, float]:
    x = omega / model.omega_c
    if x <= 0 or component is SpectrumComponent.F0F1:
        return 0.0, 0.0

    def integrand(y: np.ndarray) -> np.ndarray:
        kernel = alpha_kernel(model, component, model.omega_c * y, model.omega_c * (x - y))
        return y * (x - y) * kernel

    result = integrate(integrand, 0.0, x, cfg)
    prefactor = model.hbar**2 * model.omega_c**3 / math.pi
    return prefactor * result.value, prefactor * result.error_estimate


def force_spectrum(
    model: MirrorModel,
    component: Union[str, SpectrumComponent],
    omega: float,
    cfg: Optional[QuadratureConfig] = None,
) -> float:
    """
    Compute a vacuum force spectrum by quadrature.

    ``C[omega] = (hbar^2 / pi) int_0^omega w (omega - w) alpha[w, omega - w] dw``
    for ``omega > 0`` and zero otherwise.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        ``F0F0`` (energy), ``F1F1`` (momentum) or ``F0F1`` (always zero).
    omega : float
        The frequency.
    cfg : Optional[QuadratureConfig]
        Integration tolerances. If ``None``, the defaults are used.
        Defaults to ``None``.

    Returns
    -------
    value : float
        The spectrum value.

    Raises
    ------
    ValueError
        If ``component`` is not a force component.
    NonConvergence
        If the integral does not converge.
    """
    component = as_component(component)
    if component not in FORCE_COMPONENTS:
        raise ValueError(f"{component.value} is not a force spectrum.")
    cfg = cfg if cfg is not None else QuadratureConfig()
    return _force_spectrum_result(model, component, float(omega), cfg)[0]


def _mass_quadrature_result(
    model: MirrorModel, omega: float, cfg: QuadratureConfig
) -> Tuple[float, float]:
    x = omega / model.omega_c
    if x <= 0:
        return 0.0, 0.0

    def integrand(y: np.ndarray) -> np.ndarray:
        return y * (x - y) * _lorentzian(y) * _lorentzian(x - y)

    result = integrate(integrand, 0.0, x, cfg)
    prefactor = model.hbar**2 * model.omega_c / math.pi
    return prefactor * result.value, prefactor * result.error_estimate


def _mass_closed_form(model: MirrorModel, omega: float) -> float:
    x = omega / model.omega_c
    if x <= 0:
        return 0.0
    if x < SERIES_THRESHOLD:
        return mass_spectrum_small_x_series(model, omega)
    brace = (1.0 + 0.5 * x * x) * math.log1p(x * x) - x * math.atan(x)
    return model.hbar**2 * model.omega_c / (2.0 * math.pi) * brace / (x * (1.0 + 0.25 * x * x))


def mass_spectrum(
    model: MirrorModel,
    omega: float,
    method: Union[str, SpectrumMethod] = SpectrumMethod.QUADRATURE,
    cfg: Optional[QuadratureConfig] = None,
) -> float:
    """
    Compute the spectrum of the mass fluctuations.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : float
        The frequency.
    method : Union[str, SpectrumMethod]
        ``QUADRATURE`` integrates the reflection delays,
        ``(hbar^2 / pi) int_0^omega w (omega - w) tau[w] tau[omega - w] dw``;
        ``CLOSED_FORM`` evaluates the analytic result, switching to a Taylor
        series below ``omega = 0.01 omega_c``.
        Defaults to ``SpectrumMethod.QUADRATURE``.
    cfg : Optional[QuadratureConfig]
        Integration tolerances for the quadrature path.
        Defaults to ``None``.

    Returns
    -------
    value : float
        The spectrum value, zero for ``omega <= 0``.

    Raises
    ------
    ValueError
        If ``method`` is neither quadrature nor closed form.
    NonConvergence
        If the quadrature does not converge.
    """
    method = as_method(method)
    if method is SpectrumMethod.QUADRATURE:
        cfg = cfg if cfg is not None else QuadratureConfig()
        return _mass_quadrature_result(model, float(omega), cfg)[0]
    if method is SpectrumMethod.CLOSED_FORM:
        return _mass_closed_form(model, float(omega))
    raise ValueError(f"mass_spectrum supports the quad and closed methods, not {method.value}.")


def mass_spectrum_small_x_series(model: MirrorModel, omega: float) -> float:
    """
    Evaluate the closed-form mass spectrum by its Taylor series in ``omega``.

    The series keeps four orders in ``z = (omega / omega_c)^2`` which makes it
    exact to double precision below the switchover threshold.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : float
        The frequency, ``|omega| < 0.01 omega_c``.

    Returns
    -------
    value : float
        The spectrum value, zero for ``omega <= 0``.

    Raises
    ------
    ValueError
        If ``|omega| >= 0.01 omega_c``.
    """
    x = float(omega) / model.omega_c
    if abs(x) >= SERIES_THRESHOLD:
        raise ValueError(
            f"The series is only valid for |omega| < {SERIES_THRESHOLD} omega_c, "
            f"got omega / omega_c = {x}."
        )
    if x <= 0:
        return 0.0
    z = x * x
    series = 1.0 / 3.0 + z * (-7.0 / 60.0 + z * (5.0 / 84.0 - z * 13.0 / 360.0))
    return model.hbar**2 * model.omega_c / (2.0 * math.pi) * x**3 * series / (1.0 + 0.25 * z)


def low_freq_asymptote(
    model: MirrorModel, component: Union[str, SpectrumComponent], omega: float
) -> float:
    """
    Compute the leading low-frequency behavior of a spectrum.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        ``F0F0`` (order ``omega^5``), ``F1F1`` or ``MASS`` (order
        ``omega^3``) or ``P1P1`` (order ``omega``).
    omega : float
        The frequency.

    Returns
    -------
    value : float
        The asymptote, zero for ``omega <= 0``.

    Raises
    ------
    ValueError
        If no asymptote is implemented for ``component``.
    """
    component = as_component(component)
    omega = float(omega)
    hbar2 = model.hbar**2

    if component is SpectrumComponent.F0F0:
        derivatives = amplitude_derivatives_at_zero(model)
        coefficient = ((1j * derivatives.s) ** 2 + (1j * derivatives.r) ** 2).real
        value = coefficient * hbar2 * omega**5 / (12.0 * math.pi)
    elif component in (SpectrumComponent.F1F1, SpectrumComponent.P1P1):
        r0 = amplitudes(model, 0.0).r
        value = (r0 * r0).real * hbar2 * omega**3 / (3.0 * math.pi)
        if component is SpectrumComponent.P1P1 and omega > 0:
            value /= omega * omega
    elif component is SpectrumComponent.MASS:
        value = hbar2 * omega**3 / (6.0 * math.pi * model.omega_c**2)
    else:
        raise ValueError(f"No low-frequency asymptote is implemented for {component.value}.")

    return value if omega > 0 else 0.0


def field_autocorrelation(model: MirrorModel, omega: ArrayLike) -> Union[float, np.ndarray]:
    """
    Compute the spectrum of the field on the mirror, ``hbar omega tau / omega_c``.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : ArrayLike
        One or more frequencies.

    Returns
    -------
    value : Union[float, numpy.ndarray]
        The spectrum, zero at nonpositive frequencies. Its maximum is
        ``hbar / (2 omega_c)`` at ``omega = omega_c``.
    """
    x = np.asarray(omega, dtype=float) / model.omega_c
    value = np.where(x > 0, model.hbar * x * _lorentzian(x) / model.omega_c, 0.0)
    return value.item() if value.ndim == 0 else value


def _convolution_result(
    model: MirrorModel, omega: float, cfg: QuadratureConfig, lambda_cut: Optional[float] = None
) -> Tuple[float, float]:
    """Self-convolution of the field spectrum, optionally truncated at ``lambda_cut``."""
    lower, upper = 0.0, omega
    if lambda_cut is not None:
        lower, upper = max(0.0, omega - lambda_cut), min(omega, lambda_cut)
    if omega <= 0 or upper <= lower:
        return 0.0, 0.0

    def integrand(w: np.ndarray) -> np.ndarray:
        return field_autocorrelation(model, w) * field_autocorrelation(model, omega - w)

    result = integrate(integrand, lower, upper, cfg)
    prefactor = model.omega_c**2 / math.pi
    return prefactor * result.value, prefactor * result.error_estimate


def mass_spectrum_via_convolution(
    model: MirrorModel, omega: float, cfg: Optional[QuadratureConfig] = None
) -> float:
    """
    Compute the mass spectrum as the self-convolution of the field spectrum.

    Since the induced mass is ``omega_c`` times the squared field on the
    mirror, ``C_mm[omega] = (omega_c^2 / pi) int_0^omega C_ff[w] C_ff[omega - w] dw``.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : float
        The frequency.
    cfg : Optional[QuadratureConfig]
        Integration tolerances.
        Defaults to ``None``.

    Returns
    -------
    value : float
        The spectrum value, zero for ``omega <= 0``.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    return _convolution_result(model, float(omega), cfg)[0]


def momentum_spectrum(
    model: MirrorModel, omega: float, cfg: Optional[QuadratureConfig] = None
) -> float:
    """
    Compute the spectrum of the mirror momentum driven by the vacuum force.

    From ``dp/dt = F`` the momentum spectrum is ``C_F1F1[omega] / omega^2``.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : float
        The frequency.
    cfg : Optional[QuadratureConfig]
        Integration tolerances.
        Defaults to ``None``.

    Returns
    -------
    value : float
        The spectrum value, zero for ``omega <= 0``.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    omega = float(omega)
    if omega <= 0:
        return 0.0
    return _force_spectrum_result(model, SpectrumComponent.F1F1, omega, cfg)[0] / omega**2


def mean_induced_mass(
    model: MirrorModel,
    lambda_cut: float,
    cfg: Optional[QuadratureConfig] = None,
    method: Union[str, SpectrumMethod] = SpectrumMethod.QUADRATURE,
) -> float:
    """
    Compute the mean mass induced by the vacuum up to a cut-off frequency.

    The integral ``int_0^lambda_cut (d omega / 2 pi) hbar omega tau[omega]``
    equals ``(hbar omega_c / 4 pi) log(1 + lambda_cut^2 / omega_c^2)`` and
    grows logarithmically with the cut-off.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    lambda_cut : float
        The ultraviolet cut-off, strictly positive.
    cfg : Optional[QuadratureConfig]
        Integration tolerances for the quadrature path.
        Defaults to ``None``.
    method : Union[str, SpectrumMethod]
        ``QUADRATURE`` or ``CLOSED_FORM``.
        Defaults to ``SpectrumMethod.QUADRATURE``.

    Returns
    -------
    mass : float
        The mean induced mass.

    Raises
    ------
    ValueError
        If ``lambda_cut`` is not strictly positive or the method is invalid.
    """
    method = as_method(method)
    lambda_cut = float(lambda_cut)
    if not (math.isfinite(lambda_cut) and lambda_cut > 0):
        raise ValueError(f"The cut-off must be finite and strictly positive, got {lambda_cut}.")

    if method is SpectrumMethod.CLOSED_FORM:
        ratio = lambda_cut / model.omega_c
        return model.hbar * model.omega_c / (4.0 * math.pi) * math.log1p(ratio * ratio)
    if method is SpectrumMethod.QUADRATURE:
        result = integrate_to_cutoff(lambda y: y * _lorentzian(y), lambda_cut / model.omega_c, cfg)
        return model.hbar * model.omega_c / (2.0 * math.pi) * result.value
    raise ValueError(f"mean_induced_mass supports the quad and closed methods, not {method.value}.")


def band_induced_mass(model: MirrorModel, omega_min: float, omega_max: float) -> float:
    """
    Compute the part of the mean induced mass carried by a frequency band.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega_min : float
        Lower edge of the band, nonnegative.
    omega_max : float
        Upper edge of the band, at least ``omega_min``.

    Returns
    -------
    mass : float
        ``(hbar omega_c / 4 pi) (log(1 + x_max^2) - log(1 + x_min^2))``.

    Raises
    ------
    ValueError
        If the band edges are invalid.
    """
    if not (0 <= omega_min <= omega_max and math.isfinite(omega_max)):
        raise ValueError(f"Invalid frequency band [{omega_min}, {omega_max}].")
    x_min = omega_min / model.omega_c
    x_max = omega_max / model.omega_c
    return (
        model.hbar
        * model.omega_c
        / (4.0 * math.pi)
        * (math.log1p(x_max * x_max) - math.log1p(x_min * x_min))
    )


def variance_relation_check(
    model: MirrorModel, lambda_cut: float, cfg: Optional[QuadratureConfig] = None
) -> Tuple[float, float]:
    """
    Compare the mass variance with twice the squared mean mass.

    Both sides are computed with the field spectrum truncated at
    ``lambda_cut``: the variance integrates the truncated self-convolution
    over its support ``[0, 2 lambda_cut]`` and the mean uses the same
    cut-off.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    lambda_cut : float
        The ultraviolet cut-off, strictly positive.
    cfg : Optional[QuadratureConfig]
        Tolerances of the inner integrals. The outer integral uses a relative
        tolerance of ``max(100 rel_tol, 1e-9)``.
        Defaults to ``None``.

    Returns
    -------
    variance : float
        ``int_0^inf (d omega / 2 pi) C_mm[omega]`` with the truncated spectrum.
    twice_mean_squared : float
        ``2 <dm>^2`` at the same cut-off.

    Raises
    ------
    ValueError
        If ``lambda_cut`` is not strictly positive.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    lambda_cut = float(lambda_cut)
    mean = mean_induced_mass(model, lambda_cut, method=SpectrumMethod.CLOSED_FORM)

    outer_cfg = QuadratureConfig(
        rel_tol=max(100.0 * cfg.rel_tol, 1e-9), abs_tol=cfg.abs_tol, max_depth=cfg.max_depth
    )

    def outer(omegas: np.ndarray) -> np.ndarray:
        return np.array(
            [_convolution_result(model, float(w), cfg, lambda_cut)[0] for w in omegas]
        ) / (2.0 * math.pi)

    # the truncated spectrum has a kink at the cut-off
    variance = (
        integrate(outer, 0.0, lambda_cut, outer_cfg).value
        + integrate(outer, lambda_cut, 2.0 * lambda_cut, outer_cfg).value
    )
    return variance, 2.0 * mean * mean


def evaluate_spectrum(
    model: MirrorModel,
    component: Union[str, SpectrumComponent],
    omega: float,
    method: Optional[Union[str, SpectrumMethod]] = None,
    cfg: Optional[QuadratureConfig] = None,
) -> Tuple[float, float]:
    """
    Evaluate one spectrum at one frequency with the requested method.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        The spectrum to evaluate.
    omega : float
        The frequency.
    method : Optional[Union[str, SpectrumMethod]]
        The evaluation method. If ``None``, the default method of the
        component is used.
        Defaults to ``None``.
    cfg : Optional[QuadratureConfig]
        Integration tolerances.
        Defaults to ``None``.

    Returns
    -------
    value : float
        The spectrum value.
    error_estimate : float
        Absolute error estimate; zero for closed forms and asymptotes.

    Raises
    ------
    ValueError
        If ``method`` is not valid for ``component``.
    """
    component = as_component(component)
    method = DEFAULT_METHODS[component] if method is None else as_method(method)
    check_method(component, method)
    cfg = cfg if cfg is not None else QuadratureConfig()
    omega = float(omega)

    if method is SpectrumMethod.ASYMPTOTE:
        return low_freq_asymptote(model, component, omega), 0.0
    if component in FORCE_COMPONENTS:
        return _force_spectrum_result(model, component, omega, cfg)
    if component is SpectrumComponent.P1P1:
        if omega <= 0:
            return 0.0, 0.0
        value, error = _force_spectrum_result(model, SpectrumComponent.F1F1, omega, cfg)
        return value / omega**2, error / omega**2
    if component is SpectrumComponent.FIELD:
        return field_autocorrelation(model, omega), 0.0
    if method is SpectrumMethod.CLOSED_FORM:
        return _mass_closed_form(model, omega), 0.0
    if method is SpectrumMethod.CONVOLUTION:
        return _convolution_result(model, omega, cfg)
    return _mass_quadrature_result(model, omega, cfg)


def check_method(
    component: Union[str, SpectrumComponent], method: Union[str, SpectrumMethod]
) -> None:
    """
    Make sure that ``method`` can evaluate ``component``.

    Raises
    ------
    ValueError
        If the pairing is not supported.
    """
    component = as_component(component)
    method = as_method(method)
    if method not in VALID_METHODS[component]:
        valid = ", ".join(valid_method.value for valid_method in VALID_METHODS[component])
        raise ValueError(
            f"The {method.value} method cannot evaluate the {component.value} "
            f"spectrum. Valid methods: {valid}."
        )


def compute_spectrum(
    model: MirrorModel,
    component: Union[str, SpectrumComponent],
    frequencies: Sequence[float],
    method: Optional[Union[str, SpectrumMethod]] = None,
    cfg: Optional[QuadratureConfig] = None,
    n_jobs: int = 1,
    silence_tqdm: bool = True,
    logger: Optional[logging.Logger] = None,
) -> SpectrumSamples:
    """
    Evaluate a spectrum on a grid of frequencies.

    The grid points are independent and are distributed over ``n_jobs``
    joblib workers; the result does not depend on the number of workers.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    component : Union[str, SpectrumComponent]
        The spectrum to evaluate.
    frequencies : Sequence[float]
        Strictly increasing frequencies.
    method : Optional[Union[str, SpectrumMethod]]
        The evaluation method; the component default if ``None``.
        Defaults to ``None``.
    cfg : Optional[QuadratureConfig]
        Integration tolerances.
        Defaults to ``None``.
    n_jobs : int
        Number of joblib workers.
        Defaults to 1.
    silence_tqdm : bool
        Whether to hide the progress bar.
        Defaults to ``True``.
    logger : Optional[logging.Logger]
        A logger object. If ``None``, the module logger is used.
        Defaults to ``None``.

    Returns
    -------
    samples : SpectrumSamples
        The sampled spectrum.

    Raises
    ------
    ValueError
        If the frequencies are not strictly increasing or the method is
        invalid for the component.
    """
    logger = logger if logger else logging.getLogger(__name__)
    component = as_component(component)
    method = DEFAULT_METHODS[component] if method is None else as_method(method)
    check_method(component, method)

    frequencies = np.asarray(frequencies, dtype=float).ravel()
    if np.any(np.diff(frequencies) <= 0):
        raise ValueError("The frequencies must be strictly increasing.")

    logger.info(
        f"Evaluating the {component.value} spectrum with the {method.value} "
        f"method at {len(frequencies)} frequencies."
    )
    with tqdm_joblib(tqdm(desc="Spectrum", total=len(frequencies), disable=silence_tqdm)):
        results = Parallel(n_jobs=n_jobs)(
            delayed(evaluate_spectrum)(model, component, omega, method, cfg)
            for omega in frequencies
        )

    values = np.array([value for value, _ in results], dtype=float)
    errors = np.array([error for _, error in results], dtype=float)
    return SpectrumSamples(
        frequencies=frequencies,
        values=values,
        component=component,
        model=model,
        method=method,
        error_estimates=errors,
    )


def log_grid(
    model: MirrorModel, points: int = 400, low: float = 1e-3, high: float = 1e3
) -> np.ndarray:
    """
    Build a logarithmic frequency grid in units of the cut-off.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    points : int
        Number of grid points.
        Defaults to 400.
    low : float
        Lowest frequency in units of ``omega_c``.
        Defaults to ``1e-3``.
    high : float
        Highest frequency in units of ``omega_c``.
        Defaults to ``1e3``.

    Returns
    -------
    frequencies : numpy.ndarray
        ``points`` frequencies from ``low * omega_c`` to ``high * omega_c``.

    Raises
    ------
    ValueError
        If ``low`` is not positive, ``high < low`` or ``points < 1``.
    """
    if points < 1 or not 0 < low <= high:
        raise ValueError(f"Invalid logarithmic grid: {points} points over [{low}, {high}].")
    return model.omega_c * np.logspace(np.log10(low), np.log10(high), int(points))


def dimensionless_scale(component: Union[str, SpectrumComponent], model: MirrorModel) -> float:
    """
    Return the natural unit of a spectrum for dimensionless output.

    Force spectra scale as ``hbar^2 omega_c^3``, the mass and momentum
    spectra as ``hbar^2 omega_c`` and the field spectrum as
    ``hbar / omega_c``.
    """
    component = as_component(component)
    if component in FORCE_COMPONENTS:
        return model.hbar**2 * model.omega_c**3
    if component is SpectrumComponent.FIELD:
        return model.hbar / model.omega_c
    return model.hbar**2 * model.omega_c


def mean_mass_scale(model: MirrorModel) -> float:
    """Return ``hbar omega_c``, the natural unit of the induced mass."""
    return model.hbar * model.omega_c
