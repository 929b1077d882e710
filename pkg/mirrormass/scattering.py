"""
Scattering amplitudes of a partially transmitting pointlike mirror.

The mirror is described by the lorentzian reflectivity model, i.e. a source
responding instantaneously to the local field with a constant reflection
cut-off frequency. All frequencies are converted to the dimensionless ratio
``x = omega / omega_c`` before any arithmetic is done so that very large and
very small grids do not overflow or underflow.

The mirror position is fixed at the origin everywhere except in
:func:`scattering_matrix`, where it only contributes pure phases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike

RealOrArray = Union[float, np.ndarray]
ComplexOrArray = Union[complex, np.ndarray]


@dataclass(frozen=True)
class MirrorModel:
    """
    Physical configuration of the mirror.

    Parameters
    ----------
    omega_c : float
        The reflection cut-off frequency (units of inverse time). Must be
        strictly positive; positivity is equivalent to causality of the
        field scattering.
    hbar : float
        The action scale used in every spectrum.
        Defaults to 1.0.

    Raises
    ------
    ValueError
        If ``omega_c`` or ``hbar`` is not a finite positive number.
    """

    omega_c: float
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("omega_c", "hbar"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValueError(f"`{name}` must be a number. You specified {value!r}.")
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"`{name}` must be finite and strictly positive, got {value}.")
            object.__setattr__(self, name, value)

    def ratio(self, omega: ArrayLike) -> RealOrArray:
        """
        Convert raw frequencies to the dimensionless ratio ``omega / omega_c``.

        Parameters
        ----------
        omega : ArrayLike
            One or more real frequencies.

        Returns
        -------
        x : Union[float, numpy.ndarray]
            The frequencies in units of the cut-off.
        """
        return _as_output(np.asarray(omega, dtype=float) / self.omega_c)


@dataclass(frozen=True)
class AmplitudePair:
    """
    Transmission and reflection amplitudes at one (or many) frequencies.

    Parameters
    ----------
    s : Union[complex, numpy.ndarray]
        Transmission amplitude(s).
    r : Union[complex, numpy.ndarray]
        Reflection amplitude(s).
    """

    s: ComplexOrArray
    r: ComplexOrArray


def _as_output(value: np.ndarray) -> Union[float, complex, np.ndarray]:
    """Return python scalars for 0-d arrays and arrays otherwise."""
    value = np.asarray(value)
    if value.ndim == 0:
        return value.item()
    return value


def amplitudes(model: MirrorModel, omega: ArrayLike) -> AmplitudePair:
    """
    Compute the lorentzian scattering amplitudes.

    The reflection amplitude is ``r = -Omega / (Omega - i omega)`` and the
    transmission amplitude follows from the continuity of the field on the
    mirror, ``s = 1 + r``. Negative frequencies are allowed and satisfy the
    reality condition ``r[-omega] = conj(r[omega])``.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : ArrayLike
        One or more real frequencies.

    Returns
    -------
    pair : AmplitudePair
        The amplitudes, as python complex numbers for scalar input.
    """
    x = np.asarray(omega, dtype=float) / model.omega_c
    r = -1.0 / (1.0 - 1j * x)
    s = 1.0 + r
    return AmplitudePair(s=_as_output(s), r=_as_output(r))


def unitarity_residual(pair: AmplitudePair) -> RealOrArray:
    """
    Measure how far an amplitude pair is from a unitary scattering matrix.

    Parameters
    ----------
    pair : AmplitudePair
        The amplitudes to check.

    Returns
    -------
    residual : Union[float, numpy.ndarray]
        ``max(| |s|^2 + |r|^2 - 1 |, |s conj(r) + r conj(s)|)``, computed
        element-wise for array input; 0 means exactly unitary.
    """
    s = np.asarray(pair.s, dtype=complex)
    r = np.asarray(pair.r, dtype=complex)
    norm_residual = np.abs(np.abs(s) ** 2 + np.abs(r) ** 2 - 1.0)
    cross_residual = np.abs(s * np.conj(r) + r * np.conj(s))
    return _as_output(np.maximum(norm_residual, cross_residual))


def scattering_matrix(model: MirrorModel, omega: ArrayLike, q: float = 0.0) -> np.ndarray:
    """
    Build the 2x2 scattering matrix of the two-sided field decomposition.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : ArrayLike
        One or more real frequencies.
    q : float
        Position of the mirror; it only enters through the phases
        ``exp(-/+ 2 i omega q)`` of the reflection entries.
        Defaults to 0.0.

    Returns
    -------
    matrix : numpy.ndarray
        Complex array of shape ``(..., 2, 2)`` where ``...`` is the shape
        of ``omega``.
    """
    omega = np.asarray(omega, dtype=float)
    pair = amplitudes(model, omega)
    s = np.asarray(pair.s, dtype=complex)
    r = np.asarray(pair.r, dtype=complex)
    phase = np.exp(2j * omega * q)

    matrix = np.empty(omega.shape + (2, 2), dtype=complex)
    matrix[..., 0, 0] = s
    matrix[..., 0, 1] = r / phase
    matrix[..., 1, 0] = r * phase
    matrix[..., 1, 1] = s
    return matrix


def determinant(model: MirrorModel, omega: ArrayLike) -> ComplexOrArray:
    """
    Compute ``det S = s^2 - r^2`` which does not depend on the mirror position.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : ArrayLike
        One or more real frequencies.

    Returns
    -------
    det : Union[complex, numpy.ndarray]
        The determinant, of unit modulus for real frequencies.
    """
    pair = amplitudes(model, omega)
    s = np.asarray(pair.s, dtype=complex)
    r = np.asarray(pair.r, dtype=complex)
    return _as_output(s * s - r * r)


def phase_shift(model: MirrorModel, omega: ArrayLike) -> RealOrArray:
    """
    Compute the total phase shift ``Delta`` defined by ``det S = exp(i Delta)``.

    The branch is fixed by ``Delta[0] = pi`` and continuity in ``omega``,
    which for the lorentzian model gives ``Delta = pi + 2 arctan(omega / Omega)``.
    ``Delta`` is monotonically increasing and ``Delta - pi`` is odd.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : ArrayLike
        One or more real frequencies.

    Returns
    -------
    delta : Union[float, numpy.ndarray]
        The unwrapped phase shift in radians, in ``(0, 2 pi)``.
    """
    x = np.asarray(omega, dtype=float) / model.omega_c
    return _as_output(np.pi + 2.0 * np.arctan(x))


def reflection_delay(model: MirrorModel, omega: ArrayLike) -> RealOrArray:
    """
    Compute the reflection delay ``tau = Omega / (Omega^2 + omega^2)``.

    This is half the frequency derivative of :func:`phase_shift`. It is
    strictly positive, even in ``omega`` and maximal at zero frequency where
    it equals ``1 / Omega``.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.
    omega : ArrayLike
        One or more real frequencies.

    Returns
    -------
    tau : Union[float, numpy.ndarray]
        The delay in units of time.
    """
    x = np.asarray(omega, dtype=float) / model.omega_c
    return _as_output((1.0 / model.omega_c) / (1.0 + x * x))


def amplitude_derivatives_at_zero(model: MirrorModel) -> AmplitudePair:
    """
    Get the frequency derivatives ``s'[0]`` and ``r'[0]`` of the amplitudes.

    Since ``s = 1 + r`` both derivatives are equal to ``-i / Omega`` for the
    lorentzian model. They set the quasistatic coefficient of the energy
    force spectrum.

    Parameters
    ----------
    model : MirrorModel
        The mirror configuration.

    Returns
    -------
    derivatives : AmplitudePair
        The pair ``(s'[0], r'[0])``.
    """
    r_prime = -1j / model.omega_c
    return AmplitudePair(s=r_prime, r=r_prime)
