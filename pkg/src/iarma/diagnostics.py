"""Residual whiteness and normality diagnostics.

Standardized one-step residuals from a well-specified fit behave like an
ordinary random sample, so the usual equal-spacing tools apply to them even
though the raw observation times are irregular: the sample autocorrelation
function with a white-noise band, the Ljung-Box portmanteau test, and
normal quantile-quantile pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc, ndtri

from .errors import DataError, ParameterError

__all__ = ["AcfEstimate", "LjungBoxResult", "acf", "ljung_box", "qq_data"]

_Z975 = float(ndtri(0.975))


@dataclass(frozen=True)
class AcfEstimate:
    """Sample autocorrelations at lags 1..L with a white-noise band.

    ``band`` is the two-sided 95% bound z_0.975 / sqrt(n); under whiteness
    roughly 95% of the rho values should fall inside +-band.
    """

    lags: np.ndarray
    rho: np.ndarray
    band: float
    n: int


@dataclass(frozen=True)
class LjungBoxResult:
    """Portmanteau statistics Q_h for h = 1..L.

    Q_h = n (n + 2) sum_{k<=h} rho_k**2 / (n - k) is non-decreasing in h and
    is referred to a chi-square with ``df`` degrees of freedom; entries with
    df <= 0 (possible when adjusting for fitted parameters) get NaN p-values.
    """

    lags: np.ndarray
    statistic: np.ndarray
    df: np.ndarray
    p_value: np.ndarray


def _validated(x, max_lag: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError("residuals must be one-dimensional")
    if max_lag < 1:
        raise ParameterError(f"max lag must be >= 1, got {max_lag}")
    if max_lag >= x.size:
        raise ParameterError(f"max lag must be < n (got lag {max_lag} with n={x.size})")
    return x


def acf(resid, max_lag: int) -> AcfEstimate:
    """Sample autocorrelation of a residual vector at lags 1..max_lag.

    Mean-corrected and normalized by the lag-0 sum of squares, so every
    value lies in [-1, 1].  A constant input has no autocorrelation and
    raises :class:`~iarma.errors.DataError`.
    """
    x = _validated(resid, max_lag)
    centered = x - x.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise DataError("residual vector is constant; autocorrelation undefined")
    rho = np.empty(max_lag)
    for k in range(1, max_lag + 1):
        rho[k - 1] = np.dot(centered[k:], centered[:-k]) / denom
    lags = np.arange(1, max_lag + 1)
    return AcfEstimate(lags=lags, rho=rho, band=_Z975 / np.sqrt(x.size), n=x.size)


def _portmanteau(rho: np.ndarray, n: int) -> np.ndarray:
    """Cumulative Ljung-Box statistics from autocorrelations rho_1..rho_L."""
    k = np.arange(1, rho.size + 1)
    return n * (n + 2.0) * np.cumsum(rho * rho / (n - k))


def _chi2_sf(q: np.ndarray, df: np.ndarray) -> np.ndarray:
    # Survival function via the regularized upper incomplete gamma function.
    return gammaincc(df / 2.0, q / 2.0)


def ljung_box(resid, max_lag: int, df_adjust: int = 0) -> LjungBoxResult:
    """Ljung-Box whiteness test of a residual vector at lags 1..max_lag.

    ``df_adjust`` subtracts that many degrees of freedom at each lag to
    account for estimated model parameters (default 0, i.e. df = h); lags
    with df <= 0 get NaN p-values.
    """
    if df_adjust < 0:
        raise ParameterError(f"df_adjust must be >= 0, got {df_adjust}")
    est = acf(resid, max_lag)
    q = _portmanteau(est.rho, est.n)
    df = est.lags - df_adjust
    p = np.full(max_lag, np.nan)
    ok = df > 0
    p[ok] = _chi2_sf(q[ok], df[ok].astype(np.float64))
    return LjungBoxResult(lags=est.lags, statistic=q, df=df, p_value=p)


def qq_data(resid) -> tuple[np.ndarray, np.ndarray]:
    """Normal quantile-quantile pairs for a residual vector.

    Returns (theoretical, sample): the standard-normal quantiles at plotting
    positions (i - 0.5) / n against the sorted residuals.
    """
    x = np.asarray(resid, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ParameterError("need a one-dimensional vector with n >= 2")
    n = x.size
    theoretical = ndtri((np.arange(1, n + 1) - 0.5) / n)
    return theoretical, np.sort(x)
