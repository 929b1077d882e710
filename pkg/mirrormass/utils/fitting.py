"""
Straight-line fits used to measure scaling exponents and drifts.

Both the low-frequency power laws of the spectra and the late-time growth of
the squared momentum are read off as OLS slopes with ``statsmodels`` so that
every estimate comes with a standard error.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd
import statsmodels.api as sm
from numpy.typing import ArrayLike
from statsmodels.regression.linear_model import RegressionResults


@dataclass(frozen=True)
class SlopeFit:
    """
    Result of a straight-line fit ``y = intercept + slope * x``.

    Parameters
    ----------
    slope : float
        The fitted slope.
    intercept : float
        The fitted intercept.
    slope_standard_error : float
        The OLS standard error of the slope.
    nobs : int
        Number of points used in the fit.
    """

    slope: float
    intercept: float
    slope_standard_error: float
    nobs: int

    @classmethod
    def from_results(cls, fit: RegressionResults) -> "SlopeFit":
        """
        Extract the slope and intercept from a ``statsmodels`` fit object.

        Parameters
        ----------
        fit : statsmodels.regression.linear_model.RegressionResults
            Fit obtained from ``statsmodels.OLS`` with a constant column
            followed by a single regressor.

        Returns
        -------
        slope_fit : SlopeFit
            The extracted parameters.
        """
        params = np.asarray(fit.params, dtype=float)
        errors = np.asarray(fit.bse, dtype=float)
        return cls(
            slope=float(params[1]),
            intercept=float(params[0]),
            slope_standard_error=float(errors[1]),
            nobs=int(fit.nobs),
        )

    def to_frame(self) -> pd.DataFrame:
        """Convert the fit into a one-row data frame."""
        return pd.DataFrame(
            [
                {
                    "slope": self.slope,
                    "intercept": self.intercept,
                    "slope_standard_error": self.slope_standard_error,
                    "nobs": self.nobs,
                }
            ]
        )


def fit_line(x: ArrayLike, y: ArrayLike) -> SlopeFit:
    """
    Fit a straight line by ordinary least squares.

    Parameters
    ----------
    x : ArrayLike
        The regressor values.
    y : ArrayLike
        The response values.

    Returns
    -------
    slope_fit : SlopeFit
        The fitted line.

    Raises
    ------
    ValueError
        If fewer than three points are given or the lengths differ.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if len(x) != len(y):
        raise ValueError(f"Got {len(x)} regressor and {len(y)} response values.")
    if len(x) < 3:
        raise ValueError("At least three points are needed to fit a line with an error estimate.")

    X = sm.add_constant(x, has_constant="add")
    fit = sm.OLS(y, X).fit()
    return SlopeFit.from_results(fit)


def fit_power_law(x: ArrayLike, y: ArrayLike) -> SlopeFit:
    """
    Fit ``y = A x^k`` as a straight line in log-log space.

    Parameters
    ----------
    x : ArrayLike
        Strictly positive abscissas.
    y : ArrayLike
        Strictly positive values.

    Returns
    -------
    slope_fit : SlopeFit
        The exponent ``k`` is the slope and ``log10(A)`` the intercept.

    Raises
    ------
    ValueError
        If any abscissa or value is not strictly positive.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("Power-law fits need strictly positive abscissas and values.")
    return fit_line(np.log10(x), np.log10(y))
