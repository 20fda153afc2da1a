"""One-step linear prediction, the minimal state-space filter, and
standardized residuals.

Both predictors produce the best linear one-step forecast at each observation
time with mean squared error sigma2 * c_n.  ``predict_innovations`` carries
the prediction error forward directly; ``predict_statespace`` propagates the
one-dimensional state alpha with uncorrelated disturbances.  The two are
algebraically identical and are kept as separate recursions so the
equivalence can be verified rather than assumed.

Predictions are defined at the observation times only; there is no
between-sample forecasting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from ._kernels import cf_recursion, innovations, state_recursion
from .errors import NumericalError, ParameterError
from .model import C_FLOOR, IrregularSeries, ModelParams, _c1_value, _check_gaps

__all__ = [
    "InnovationTrace",
    "StateTrace",
    "predict_innovations",
    "predict_statespace",
    "forecast_bands",
]


@dataclass(frozen=True)
class InnovationTrace:
    """Per-index one-step predictions and residuals.

    ``mse[n] = sigma2 * c[n]`` is the prediction mean squared error;
    ``std_resid`` divides the raw residuals by its square root.
    ``sigma2_source`` records whether standardization used the supplied
    parameter value or the profile estimate computed from this trace.
    """

    xhat: np.ndarray
    c: np.ndarray
    resid: np.ndarray
    std_resid: np.ndarray
    sigma2: float
    sigma2_source: str
    mu: float

    @property
    def mse(self) -> np.ndarray:
        return self.sigma2 * self.c


@dataclass(frozen=True)
class StateTrace:
    """Filtered state sequence; alpha[0] = 0 and xhat[n] = alpha[n] + mu."""

    alpha: np.ndarray


def _checked_cf_inputs(params: ModelParams, series: IrregularSeries):
    gaps = _check_gaps(series.gaps)
    return params.phi ** gaps, params.theta ** gaps


def _check_c(c: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(c)) or c.min() < C_FLOOR:
        raise NumericalError(
            "innovation-variance recursion collapsed below the "
            f"{C_FLOOR:g} floor; parameters are numerically pathological"
        )
    return c


def _finish_trace(params, series, c, xhat_centered, profile_sigma2):
    xhat = xhat_centered + params.mu
    resid = series.values - xhat
    if profile_sigma2:
        sigma2 = float(np.mean(resid * resid / c))
        source = "profile"
    else:
        sigma2 = params.sigma2
        source = "supplied"
    with np.errstate(divide="ignore", invalid="ignore"):
        std_resid = resid / np.sqrt(sigma2 * c)
    return InnovationTrace(
        xhat=xhat, c=c, resid=resid, std_resid=std_resid,
        sigma2=sigma2, sigma2_source=source, mu=params.mu,
    )


def predict_innovations(
    params: ModelParams, series: IrregularSeries, profile_sigma2: bool = False
) -> InnovationTrace:
    """One-step predictions via the innovations recursion.

    The data are centered by ``params.mu`` before the recursion and the
    level is added back to the predictions (so ``xhat[0] == mu``).  With
    ``profile_sigma2=True`` the residuals are standardized by the profile
    variance estimate mean(resid**2 / c) instead of ``params.sigma2``.
    """
    pp, tp = _checked_cf_inputs(params, series)
    x = series.values - params.mu
    c, xhat = innovations(x, pp, tp, _c1_value(params.phi, params.theta))
    _check_c(c)
    return _finish_trace(params, series, c, xhat, profile_sigma2)


def predict_statespace(
    params: ModelParams, series: IrregularSeries, profile_sigma2: bool = False
) -> tuple[StateTrace, InnovationTrace]:
    """One-step predictions via the minimal state-space filter.

    Propagates the scalar state alpha with uncorrelated measurement and
    transition disturbances; the prediction at each time is alpha + mu.
    Must agree with :func:`predict_innovations` to machine precision.
    """
    pp, tp = _checked_cf_inputs(params, series)
    x = series.values - params.mu
    c = _check_c(cf_recursion(pp, tp, _c1_value(params.phi, params.theta)))
    alpha = state_recursion(x, pp, tp, c)
    trace = _finish_trace(params, series, c, alpha, profile_sigma2)
    return StateTrace(alpha=alpha), trace


def forecast_bands(
    trace: InnovationTrace, params: ModelParams, coverage: float = 0.95
) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric Gaussian prediction bands around the one-step forecasts.

    Returns ``(lo, hi)`` with ``xhat +- z * sqrt(sigma2 * c_n)`` where z is
    the standard-normal quantile at (1 + coverage) / 2.  Bands are nested in
    the coverage level; coverage 0 collapses them onto the predictions.
    """
    if not 0.0 <= coverage < 1.0:
        raise ParameterError(f"coverage must be in [0, 1), got {coverage}")
    z = float(ndtri(0.5 * (1.0 + coverage)))
    half = z * np.sqrt(params.sigma2 * trace.c)
    return trace.xhat - half, trace.xhat + half
