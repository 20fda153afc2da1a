"""Gaussian likelihood, profile objective, box-constrained ML fitting, and
numerical-Hessian standard errors.

The exact Gaussian log-likelihood factorizes through the one-step prediction
errors:

    loglik = -N/2 * log(2*pi) - N/2 * log(sigma2)
             - 1/2 * sum(log c_n) - 1/2 * sum(resid_n**2 / (sigma2 * c_n)).

Maximizing analytically over sigma2 gives the profile estimate
sigma2_hat(phi, theta) = mean(resid**2 / c) and the two-parameter objective

    q(phi, theta) = log(sigma2_hat) + mean(log c_n),

whose minimizer over the box [0, 1 - eps]^2 is the ML estimate.  The
identity loglik = -N/2 * (log(2*pi) + 1) - N/2 * q holds at the profile.

Optimization uses L-BFGS-B with central-difference gradients
(step = cbrt(machine eps) * max(1, |x|), one-sided at the box edges),
projected-gradient tolerance 1e-8, relative objective tolerance 1e-10, and
an iteration cap of 500, started from the four corners of {0.2, 0.7}^2; the
best final objective wins, with ties broken toward the smaller phi + theta.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtr

from ._kernels import innovations
from .errors import DataError, FitError, NumericalError, ParameterError
from .model import C_FLOOR, IrregularSeries, ModelParams, _c1_value, _check_gaps

__all__ = [
    "BOUND_EPS",
    "FitResult",
    "WaldTest",
    "loglik",
    "reduced_likelihood",
    "fit_ml",
    "standard_errors",
    "wald_test",
]

# Parameters are constrained to [0, 1 - BOUND_EPS] so c_1 stays finite.
BOUND_EPS = 1e-6
_BOX = (0.0, 1.0 - BOUND_EPS)
_STARTS = ((0.2, 0.2), (0.2, 0.7), (0.7, 0.2), (0.7, 0.7))
_OPTIONS = {"ftol": 1e-10, "gtol": 1e-8, "maxiter": 500}
_Q_TIE = 1e-10
_AT_BOUND_TOL = 1e-8
_HESS_STEP = 1e-4


@dataclass(frozen=True)
class WaldTest:
    """Two-sided Gaussian test of a single estimate against zero."""

    z: float
    p_value: float
    level: float
    significant: bool


@dataclass(frozen=True)
class FitResult:
    """Maximum-likelihood fit of (phi, theta, sigma2).

    ``params`` carries the estimates together with the level ``mu`` that was
    subtracted before fitting (the sample mean under demeaning, otherwise the
    value supplied or zero; mu is never jointly estimated).  Standard errors
    come from the numerically differentiated Hessian of the negative
    log-likelihood and are NaN when unavailable (typically at a box bound).
    ``boundary`` maps each free parameter to "lower", "upper", or None.
    """

    params: ModelParams
    se_phi: float
    se_theta: float
    se_sigma2: float
    loglik: float
    q_value: float
    converged: bool
    iterations: int
    boundary: dict
    demeaned: bool
    n_obs: int

    @property
    def se_available(self) -> bool:
        return math.isfinite(self.se_sigma2)


def _innovation_stats(phi: float, theta: float, x: np.ndarray, gaps: np.ndarray):
    """(c, resid) for centered data; raises NumericalError on a floor breach."""
    pp = phi ** gaps
    tp = theta ** gaps
    c, xhat = innovations(x, pp, tp, _c1_value(phi, theta))
    if not np.all(np.isfinite(c)) or c.min() < C_FLOOR:
        raise NumericalError(
            f"innovation-variance recursion collapsed below the {C_FLOOR:g} floor "
            f"at (phi={phi:.6g}, theta={theta:.6g})"
        )
    return c, x - xhat


def _profile(phi: float, theta: float, x: np.ndarray, gaps: np.ndarray):
    """(q, sigma2_hat) of the profile objective at raw parameter values."""
    c, resid = _innovation_stats(phi, theta, x, gaps)
    sigma2 = float(np.mean(resid * resid / c))
    if sigma2 <= 0.0:
        raise DataError(
            "all one-step residuals are zero; the data are degenerate for this model"
        )
    return math.log(sigma2) + float(np.mean(np.log(c))), sigma2


def _loglik_raw(phi: float, theta: float, sigma2: float, x: np.ndarray, gaps: np.ndarray) -> float:
    """Full log-likelihood without the [0,1) box on theta (used by the
    finite-difference Hessian, whose stencil may step just past 1)."""
    c, resid = _innovation_stats(phi, theta, x, gaps)
    n = x.size
    with np.errstate(over="ignore"):  # overflow surfaces as the error below
        value = (
            -0.5 * n * math.log(2.0 * math.pi)
            - 0.5 * n * math.log(sigma2)
            - 0.5 * float(np.sum(np.log(c)))
            - 0.5 * float(np.sum(resid * resid / c)) / sigma2
        )
    if not math.isfinite(value):
        raise NumericalError(f"log-likelihood is not finite ({value})")
    return value


def loglik(params: ModelParams, series: IrregularSeries) -> float:
    """Exact Gaussian log-likelihood of the series under ``params``.

    Computed through the innovations factorization; equals the dense
    multivariate-normal log-density under the model covariance.
    """
    gaps = _check_gaps(series.gaps)
    return _loglik_raw(params.phi, params.theta, params.sigma2, series.values - params.mu, gaps)


def reduced_likelihood(
    phi: float, theta: float, series: IrregularSeries, mu: float = 0.0
) -> tuple[float, float]:
    """Profile objective q(phi, theta) and the profiled variance estimate.

    Raises :class:`~iarma.errors.DataError` when every one-step residual is
    zero (constant or otherwise degenerate data).
    """
    if not 0.0 <= phi < 1.0:
        raise ParameterError(f"phi must be in [0, 1), got {phi}")
    if not 0.0 <= theta < 1.0:
        raise ParameterError(f"theta must be in [0, 1), got {theta}")
    gaps = _check_gaps(series.gaps)
    return _profile(float(phi), float(theta), series.values - float(mu), gaps)


def _resolve_mu(series: IrregularSeries, demean: bool, mu: Optional[float]) -> tuple[float, bool]:
    if mu is not None:
        return float(mu), False
    if demean:
        return float(series.values.mean()), True
    return 0.0, False


def _at_bound(value: float) -> Optional[str]:
    if abs(value - _BOX[0]) <= _AT_BOUND_TOL:
        return "lower"
    if abs(value - _BOX[1]) <= _AT_BOUND_TOL:
        return "upper"
    return None


def fit_ml(
    series: IrregularSeries,
    demean: bool = True,
    mu: Optional[float] = None,
    fix_phi: Optional[float] = None,
    fix_theta: Optional[float] = None,
    compute_se: bool = True,
) -> FitResult:
    """Fit (phi, theta, sigma2) by Gaussian maximum likelihood.

    Parameters
    ----------
    series : IrregularSeries
        Observations on a normalized grid (all gaps >= 1).
    demean : bool
        Subtract the sample mean before fitting (default).  Ignored when
        ``mu`` is given; with ``demean=False`` and no ``mu`` the level is
        fixed at zero.
    mu : float, optional
        Fix the level at this value instead of demeaning.
    fix_phi, fix_theta : float, optional
        Pin a coefficient instead of estimating it (``fix_phi=0`` fits the
        pure moving-average submodel, ``fix_theta=0`` the pure
        autoregressive one).  Pinned coefficients get NaN standard errors.
    compute_se : bool
        Evaluate Hessian standard errors at the optimum (default).

    Returns
    -------
    FitResult
        Best point found across the four deterministic starts.  A result
        with ``converged=False`` is still returned; only failure at every
        start raises :class:`~iarma.errors.FitError`.
    """
    if len(series) < 3:
        warnings.warn(
            f"fitting {len(series)} observation(s); estimates are unreliable below n=3",
            UserWarning,
            stacklevel=2,
        )
    gaps = _check_gaps(series.gaps)
    mu_used, demeaned = _resolve_mu(series, demean, mu)
    x = series.values - mu_used
    if not np.any(x):
        raise DataError("series is constant after centering; nothing to fit")

    for name, value in (("fix_phi", fix_phi), ("fix_theta", fix_theta)):
        if value is not None and not _BOX[0] <= value <= _BOX[1]:
            raise ParameterError(f"{name} must be in [0, {_BOX[1]}], got {value}")
    free = [i for i, fixed in enumerate((fix_phi, fix_theta)) if fixed is None]
    if not free:
        raise ParameterError("at least one of phi and theta must be free")

    def full(point: np.ndarray) -> tuple[float, float]:
        pt = [fix_phi, fix_theta]
        for slot, value in zip(free, point):
            pt[slot] = float(value)
        return pt[0], pt[1]

    def objective(point: np.ndarray) -> float:
        phi, theta = full(point)
        return _profile(phi, theta, x, gaps)[0]

    starts = sorted({tuple(s[i] for i in free) for s in _STARTS})
    bounds = [_BOX] * len(free)
    results, failures = [], []
    for start in starts:
        try:
            res = minimize(
                objective,
                np.asarray(start, dtype=np.float64),
                method="L-BFGS-B",
                jac="3-point",
                bounds=bounds,
                options=_OPTIONS,
            )
        except (NumericalError, DataError) as exc:
            failures.append(f"start {start}: {exc}")
            continue
        if math.isfinite(res.fun):
            results.append(res)
        else:
            failures.append(f"start {start}: non-finite objective at exit")
    if not results:
        raise FitError("optimizer failed at every start: " + "; ".join(failures))

    q_min = min(res.fun for res in results)
    tied = [res for res in results if res.fun <= q_min + _Q_TIE]
    best = min(tied, key=lambda res: float(np.sum(res.x)))

    phi_hat, theta_hat = full(best.x)
    q_value, sigma2_hat = _profile(phi_hat, theta_hat, x, gaps)
    params_hat = ModelParams(phi=phi_hat, theta=theta_hat, sigma2=sigma2_hat, mu=mu_used)
    ll = _loglik_raw(phi_hat, theta_hat, sigma2_hat, x, gaps)

    if compute_se:
        se = _hessian_se(
            phi_hat, theta_hat, sigma2_hat, x, gaps,
            phi_free=fix_phi is None, theta_free=fix_theta is None,
        )
    else:
        se = (math.nan, math.nan, math.nan)

    boundary = {}
    if fix_phi is None:
        boundary["phi"] = _at_bound(phi_hat)
    if fix_theta is None:
        boundary["theta"] = _at_bound(theta_hat)

    return FitResult(
        params=params_hat,
        se_phi=se[0],
        se_theta=se[1],
        se_sigma2=se[2],
        loglik=ll,
        q_value=q_value,
        converged=bool(best.success),
        iterations=int(best.nit),
        boundary=boundary,
        demeaned=demeaned,
        n_obs=len(series),
    )


def _hessian_se(
    phi: float,
    theta: float,
    sigma2: float,
    x: np.ndarray,
    gaps: np.ndarray,
    phi_free: bool = True,
    theta_free: bool = True,
) -> tuple[float, float, float]:
    """Standard errors from the central-difference Hessian of -loglik.

    Differentiates over the free coordinates of (phi, theta, sigma2) with
    per-coordinate step 1e-4 * max(1, |value|); sigma2 is differentiated on
    its raw scale.  Returns NaNs when a stencil point is inadmissible
    (phi stepping to 1 or any coordinate below its natural floor) or the
    Hessian is not positive definite, both common at a box bound.  A theta
    stencil slightly above 1 is allowed: the likelihood is smooth there even
    though the point is outside the model class.
    """
    nan3 = (math.nan, math.nan, math.nan)
    coords = [i for i, is_free in enumerate((phi_free, theta_free, True)) if is_free]
    center = np.asarray([phi, theta, sigma2], dtype=np.float64)
    h = _HESS_STEP * np.maximum(1.0, np.abs(center))

    def admissible(v: np.ndarray) -> bool:
        return 0.0 <= v[0] < 1.0 and v[1] >= 0.0 and v[2] > 0.0

    def neg_ll(v: np.ndarray) -> float:
        return -_loglik_raw(v[0], v[1], v[2], x, gaps)

    k = len(coords)
    stencil = [center.copy()]
    for a, i in enumerate(coords):
        for si in (-1.0, 1.0):
            p = center.copy()
            p[i] += si * h[i]
            stencil.append(p)
        for j in coords[a + 1:]:
            for si in (-1.0, 1.0):
                for sj in (-1.0, 1.0):
                    p = center.copy()
                    p[i] += si * h[i]
                    p[j] += sj * h[j]
                    stencil.append(p)
    if not all(admissible(p) for p in stencil):
        return nan3

    try:
        f0 = neg_ll(center)
        hess = np.empty((k, k))
        for a, i in enumerate(coords):
            ei = np.zeros(3)
            ei[i] = h[i]
            hess[a, a] = (neg_ll(center + ei) - 2.0 * f0 + neg_ll(center - ei)) / h[i] ** 2
            for b in range(a + 1, k):
                j = coords[b]
                ej = np.zeros(3)
                ej[j] = h[j]
                hess[a, b] = hess[b, a] = (
                    neg_ll(center + ei + ej)
                    - neg_ll(center + ei - ej)
                    - neg_ll(center - ei + ej)
                    + neg_ll(center - ei - ej)
                ) / (4.0 * h[i] * h[j])
    except (NumericalError, DataError):
        return nan3
    if not np.all(np.isfinite(hess)):
        return nan3
    try:
        np.linalg.cholesky(hess)
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return nan3
    diag = np.diag(cov)
    if np.any(diag <= 0.0):
        return nan3
    out = [math.nan, math.nan, math.nan]
    for a, i in enumerate(coords):
        out[i] = math.sqrt(diag[a])
    return out[0], out[1], out[2]


def standard_errors(params: ModelParams, series: IrregularSeries) -> tuple[float, float, float]:
    """Standard errors of (phi, theta, sigma2) at a fitted point.

    Thin wrapper over the central-difference Hessian of the negative
    log-likelihood; see :func:`fit_ml` for the boundary caveats.  The series
    is centered by ``params.mu``.
    """
    gaps = _check_gaps(series.gaps)
    return _hessian_se(
        params.phi, params.theta, params.sigma2, series.values - params.mu, gaps
    )


def wald_test(estimate: float, se: float, level: float = 0.05) -> WaldTest:
    """Two-sided Gaussian z-test of ``estimate`` against zero."""
    if not 0.0 < level < 1.0:
        raise ParameterError(f"level must be in (0, 1), got {level}")
    if not (math.isfinite(se) and se > 0.0):
        raise ParameterError(f"standard error unavailable or non-positive ({se})")
    z = estimate / se
    p = 2.0 * float(ndtr(-abs(z)))
    return WaldTest(z=z, p_value=p, level=level, significant=p < level)
