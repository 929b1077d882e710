"""
Adaptive numerical integration over finite intervals.

Every spectrum integral in the package goes through :func:`integrate`, a
globally adaptive bisection scheme that uses the embedded 7-point Gauss /
15-point Kronrod rule pair on each panel. The panel error is the difference
between the two rules and the panel with the largest error is always split
first, so node placement is deterministic and results are bit-reproducible.

Integrands are called with a ``numpy.ndarray`` of abscissas and must return
an array of the same shape (or a scalar, which is broadcast). Integrands
that are evaluated from several threads at once must be safe for concurrent
evaluation themselves.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

Integrand = Callable[[np.ndarray], np.ndarray]

# positive Kronrod abscissas in decreasing order; the ones with odd
# indices are also the abscissas of the 7-point Gauss rule
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)


def _full_rule() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Expand the tabulated half rules into 15 nodes on ``[-1, 1]``."""
    nodes = np.concatenate([-_XGK[:7], _XGK[7::-1]])
    kronrod_weights = np.concatenate([_WGK[:7], _WGK[7::-1]])

    gauss_half = np.zeros(8)
    gauss_half[1::2] = _WG
    gauss_weights = np.concatenate([gauss_half[:7], gauss_half[7::-1]])
    return nodes, kronrod_weights, gauss_weights


_NODES, _KRONROD_WEIGHTS, _GAUSS_WEIGHTS = _full_rule()


@dataclass(frozen=True)
class QuadratureConfig:
    """
    Tolerances of the adaptive integrator.

    Parameters
    ----------
    rel_tol : float
        Requested relative accuracy.
        Defaults to ``1e-10``.
    abs_tol : float
        Requested absolute accuracy.
        Defaults to ``1e-14``.
    max_depth : int
        Maximum number of times any panel may be bisected.
        Defaults to 50.

    Raises
    ------
    ValueError
        If ``rel_tol <= 0``, ``abs_tol < 0`` or ``max_depth < 1``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_depth: int = 50

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"`rel_tol` must be positive, got {self.rel_tol}.")
        if not self.abs_tol >= 0:
            raise ValueError(f"`abs_tol` must be non-negative, got {self.abs_tol}.")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"`max_depth` must be a positive integer, got {self.max_depth}.")

    def tolerance(self, value: float) -> float:
        """Return the error target for an integral estimate ``value``."""
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadratureResult:
    """
    Outcome of an integration.

    Parameters
    ----------
    value : float
        The integral estimate.
    error_estimate : float
        The sum of the Gauss/Kronrod differences over all final panels.
    evaluations : int
        Number of integrand evaluations used.
    """

    value: float
    error_estimate: float
    evaluations: int


class QuadratureError(ArithmeticError):
    """Base class for numerical failures of the integrator."""


class NonConvergence(QuadratureError):
    """
    Raised when the requested tolerance cannot be met within ``max_depth``.

    Attributes
    ----------
    value : float
        The best integral estimate at the time of failure.
    error_estimate : float
        The corresponding error estimate.
    """

    def __init__(self, message: str, value: float, error_estimate: float):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class NonFiniteSample(QuadratureError):
    """
    Raised when the integrand returns ``nan`` or ``inf``.

    Attributes
    ----------
    abscissa : float
        The first abscissa at which a non-finite value was returned.
    """

    def __init__(self, message: str, abscissa: float):
        super().__init__(message)
        self.abscissa = abscissa


def _evaluate_panel(f: Integrand, a: float, b: float) -> Tuple[float, float]:
    """
    Apply the Gauss-Kronrod pair on ``[a, b]``.

    Returns
    -------
    kronrod : float
        The 15-point estimate of the panel integral.
    error : float
        The absolute difference between the 15- and 7-point estimates.
    """
    center = 0.5 * (a + b)
    half_width = 0.5 * (b - a)
    nodes = center + half_width * _NODES

    values = np.broadcast_to(np.asarray(f(nodes), dtype=float), nodes.shape)
    finite = np.isfinite(values)
    if not finite.all():
        abscissa = float(nodes[np.argmin(finite)])
        raise NonFiniteSample(f"The integrand is not finite at x = {abscissa!r}.", abscissa)

    kronrod = half_width * float(np.dot(_KRONROD_WEIGHTS, values))
    gauss = half_width * float(np.dot(_GAUSS_WEIGHTS, values))
    return kronrod, abs(kronrod - gauss)


def integrate(
    f: Integrand, a: float, b: float, cfg: Optional[QuadratureConfig] = None
) -> QuadratureResult:
    """
    Integrate ``f`` over the finite interval ``[a, b]``.

    Parameters
    ----------
    f : Callable[[numpy.ndarray], numpy.ndarray]
        Vectorized integrand, finite on ``[a, b]``.
    a : float
        Lower limit.
    b : float
        Upper limit, ``b >= a``.
    cfg : Optional[QuadratureConfig]
        Tolerances. If ``None``, the defaults are used.
        Defaults to ``None``.

    Returns
    -------
    result : QuadratureResult
        The integral, its error estimate and the evaluation count. An empty
        interval returns an exact zero.

    Raises
    ------
    ValueError
        If a limit is not finite or ``a > b``.
    NonConvergence
        If a panel would have to be split more than ``cfg.max_depth`` times.
    NonFiniteSample
        If the integrand returns a non-finite value.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    a = float(a)
    b = float(b)

    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"Integration limits must be finite, got [{a}, {b}].")
    if a > b:
        raise ValueError(f"The lower limit must not exceed the upper limit, got [{a}, {b}].")
    if a == b:
        return QuadratureResult(value=0.0, error_estimate=0.0, evaluations=0)

    value, error = _evaluate_panel(f, a, b)
    evaluations = len(_NODES)

    # each heap entry is (-error, a, b, value, error, depth) so that
    # the panel with the largest error is always popped first
    heap: List[Tuple[float, float, float, float, float, int]] = [(-error, a, b, value, error, 0)]
    total_value, total_error = value, error

    while total_error > cfg.tolerance(total_value):
        _, left, right, panel_value, panel_error, depth = heapq.heappop(heap)
        middle = 0.5 * (left + right)

        if depth >= cfg.max_depth or not left < middle < right:
            raise NonConvergence(
                f"Could not reach the requested tolerance on [{a}, {b}] within "
                f"{cfg.max_depth} bisections (estimate {total_value!r}, "
                f"error {total_error!r}).",
                value=total_value,
                error_estimate=total_error,
            )

        for lower, upper in ((left, middle), (middle, right)):
            child_value, child_error = _evaluate_panel(f, lower, upper)
            heapq.heappush(heap, (-child_error, lower, upper, child_value, child_error, depth + 1))
        evaluations += 2 * len(_NODES)

        total_value = math.fsum(entry[3] for entry in heap)
        total_error = math.fsum(entry[4] for entry in heap)

    return QuadratureResult(value=total_value, error_estimate=total_error, evaluations=evaluations)


def integrate_to_cutoff(
    f: Integrand, lambda_cut: float, cfg: Optional[QuadratureConfig] = None
) -> QuadratureResult:
    """
    Integrate ``f`` from zero up to an explicit ultraviolet cut-off.

    This is the only entry point used for integrals that diverge without a
    cut-off, so that every such call site has to state its cut-off.

    Parameters
    ----------
    f : Callable[[numpy.ndarray], numpy.ndarray]
        Vectorized integrand.
    lambda_cut : float
        The cut-off, strictly positive.
    cfg : Optional[QuadratureConfig]
        Tolerances. If ``None``, the defaults are used.
        Defaults to ``None``.

    Returns
    -------
    result : QuadratureResult
        Same as ``integrate(f, 0, lambda_cut, cfg)``.

    Raises
    ------
    ValueError
        If ``lambda_cut`` is not a finite positive number.
    """
    if not (math.isfinite(lambda_cut) and lambda_cut > 0):
        raise ValueError(f"The cut-off must be finite and strictly positive, got {lambda_cut}.")
    return integrate(f, 0.0, lambda_cut, cfg)
