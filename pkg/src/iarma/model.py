"""Core model: parameters, irregular time grids, innovation-variance factors,
second moments, and exact Gaussian simulation.

The process observed at strictly increasing times t_1 < t_2 < ... evolves as

    X[t_{n+1}] = phi**d * X[t_n] + eps[t_{n+1}] + (theta**d / c_n) * eps[t_n],

where d = t_{n+1} - t_n is the gap, the innovations eps[t_n] are independent
Gaussians with variance sigma2 * c_n, and the dimensionless factors c_n follow
the backward continued-fraction recursion

    c_1     = (1 + 2*phi*theta + theta**2) / (1 - phi**2)
    c_{n+1} = c_1 * (1 - phi**(2d)) - 2 * (phi*theta)**d - theta**(2d) / c_n.

With every gap >= 1 and 0 <= phi, theta < 1 the sequence stays strictly
positive, which is what makes the construction valid; grids whose smallest
gap is below 1 must be rescaled first (see ``IrregularSeries.normalized``).
On a unit-gap grid the process reduces to the classical ARMA(1,1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from ._kernels import cf_recursion, simulate_recursion
from .errors import NumericalError, ParameterError, TimeGridError

__all__ = [
    "C_FLOOR",
    "ModelParams",
    "IrregularSeries",
    "CfSequence",
    "c1",
    "cf_sequence",
    "gamma0",
    "gamma1",
    "autocov",
    "autocorr",
    "lag1_autocorr",
    "simulate",
    "sample_gaps",
    "times_from_gaps",
]

# Hard floor for the c_n recursion.  Inside the admissible parameter box the
# sequence provably stays >= 1 - theta**2, so a value this small signals a
# numerical pathology rather than a valid model state.
C_FLOOR = 1e-12

# Relative slack when checking "gap >= 1", absorbing rounding from rescaling.
_GAP_TOL = 1e-9

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class ModelParams:
    """Parameter triple (phi, theta, sigma2) plus an optional level mu.

    phi and theta must lie in [0, 1) and sigma2 must be positive; violations
    raise :class:`~iarma.errors.ParameterError` at construction.
    """

    phi: float
    theta: float
    sigma2: float
    mu: float = 0.0

    def __post_init__(self):
        for name in ("phi", "theta", "sigma2", "mu"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if not 0.0 <= self.phi < 1.0:
            raise ParameterError(f"phi must be in [0, 1), got {self.phi}")
        if not 0.0 <= self.theta < 1.0:
            raise ParameterError(f"theta must be in [0, 1), got {self.theta}")
        if self.sigma2 <= 0.0:
            raise ParameterError(f"sigma2 must be > 0, got {self.sigma2}")


class IrregularSeries:
    """Strictly increasing observation times with their values.

    Raises :class:`~iarma.errors.TimeGridError` for unsorted or duplicate
    times (duplicates are reported with their indices; no averaging is
    attempted).  Gaps between consecutive times are derived lazily and
    cached.  Instances are immutable and safe to share across threads.
    """

    def __init__(self, times, values):
        times = np.ascontiguousarray(times, dtype=np.float64)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if times.ndim != 1 or values.ndim != 1:
            raise TimeGridError("times and values must be one-dimensional")
        if times.shape != values.shape:
            raise TimeGridError(
                f"times and values differ in length: {times.size} vs {values.size}"
            )
        if times.size < 1:
            raise TimeGridError("series must contain at least one observation")
        if not np.all(np.isfinite(times)):
            raise TimeGridError("times contain non-finite entries")
        if not np.all(np.isfinite(values)):
            raise TimeGridError("values contain non-finite entries")
        dt = np.diff(times)
        dup = np.flatnonzero(dt == 0.0)
        if dup.size:
            shown = ", ".join(str(i) for i in dup[:10])
            more = "" if dup.size <= 10 else f" (+{dup.size - 10} more)"
            raise TimeGridError(
                f"duplicate timestamps at index pairs ({shown}){more}; "
                "remove or merge simultaneous observations before modeling"
            )
        if np.any(dt < 0.0):
            first = int(np.flatnonzero(dt < 0.0)[0])
            raise TimeGridError(f"times must be strictly increasing (violated at index {first + 1})")
        times.setflags(write=False)
        values.setflags(write=False)
        self._times = times
        self._values = values

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def values(self) -> np.ndarray:
        return self._values

    @cached_property
    def gaps(self) -> np.ndarray:
        g = np.diff(self._times)
        g.setflags(write=False)
        return g

    @property
    def min_gap(self) -> float:
        return float(self.gaps.min()) if len(self) > 1 else math.inf

    def normalized(self) -> tuple["IrregularSeries", float]:
        """Return a series with every gap >= 1, plus the applied time scale.

        If the smallest gap is below 1, all times are divided by it; the
        returned scale is that divisor (1.0 when no rescaling was needed).
        """
        scale = self.min_gap
        if scale >= 1.0 or len(self) < 2:
            return self, 1.0
        return IrregularSeries(self._times / scale, self._values), scale

    def __len__(self) -> int:
        return self._times.size

    def __repr__(self) -> str:
        span = f"[{self._times[0]:g}, {self._times[-1]:g}]" if len(self) else "[]"
        return f"IrregularSeries(n={len(self)}, times in {span})"


@dataclass(frozen=True)
class CfSequence:
    """Innovation-variance factors and derived weights along one grid.

    ``c`` holds c_1..c_N, ``upsilon`` the innovation variances sigma2 * c_n,
    and ``varpi`` the moving-average weights theta**gap_n / c_n for
    n = 1..N-1 (the weight applied to the previous innovation).
    """

    c: np.ndarray
    upsilon: np.ndarray
    varpi: np.ndarray


def _check_gaps(gaps: np.ndarray) -> np.ndarray:
    gaps = np.asarray(gaps, dtype=np.float64)
    if gaps.size and gaps.min() < 1.0 - _GAP_TOL:
        raise TimeGridError(
            f"all gaps must be >= 1 (smallest is {gaps.min():.6g}); "
            "normalize the time grid first"
        )
    return gaps


def _c1_value(phi: float, theta: float) -> float:
    return (1.0 + 2.0 * phi * theta + theta * theta) / (1.0 - phi * phi)


def _cf_values(phi: float, theta: float, gaps: np.ndarray) -> np.ndarray:
    """c_1..c_N for raw parameter values; assumes gaps already validated."""
    pp = phi ** gaps
    tp = theta ** gaps
    c = cf_recursion(pp, tp, _c1_value(phi, theta))
    if not np.all(np.isfinite(c)) or (c.size and c.min() < C_FLOOR):
        raise NumericalError(
            "innovation-variance recursion collapsed below the "
            f"{C_FLOOR:g} floor; parameters are numerically pathological"
        )
    return c


def c1(params: ModelParams) -> float:
    """First innovation-variance factor, (1 + 2*phi*theta + theta**2) / (1 - phi**2)."""
    return _c1_value(params.phi, params.theta)


def cf_sequence(params: ModelParams, gaps) -> CfSequence:
    """Run the continued-fraction recursion along a gap sequence.

    Parameters
    ----------
    params : ModelParams
    gaps : array-like
        Gaps d_2..d_N between consecutive observation times; every entry
        must be >= 1.

    Returns
    -------
    CfSequence
        Factors c_1..c_N (N = len(gaps) + 1) with the derived innovation
        variances and moving-average weights.
    """
    gaps = _check_gaps(gaps)
    c = _cf_values(params.phi, params.theta, gaps)
    varpi = params.theta ** gaps / c[:-1] if gaps.size else np.empty(0)
    return CfSequence(c=c, upsilon=params.sigma2 * c, varpi=varpi)


def gamma0(params: ModelParams) -> float:
    """Process variance sigma2 * c_1."""
    return params.sigma2 * c1(params)


def gamma1(params: ModelParams, gap: float) -> float:
    """Covariance of two consecutive observations separated by ``gap``."""
    gap = float(gap)
    if gap < 1.0 - _GAP_TOL:
        raise TimeGridError(f"gap must be >= 1, got {gap:.6g}")
    return params.sigma2 * (params.phi ** gap * c1(params) + params.theta ** gap)


def autocov(params: ModelParams, t_n: float, t_next: float, t_far: float) -> float:
    """Covariance of the observations at ``t_n`` and ``t_far``.

    ``t_next`` is the observation time immediately after ``t_n``; the
    covariance at two or more steps decays from the one-step value as
    phi**(t_far - t_next).  Passing ``t_far == t_n`` gives the variance and
    ``t_far == t_next`` the one-step covariance.
    """
    t_n, t_next, t_far = float(t_n), float(t_next), float(t_far)
    if t_far == t_n:
        return gamma0(params)
    if t_next <= t_n or t_far < t_next:
        raise TimeGridError(
            f"times must satisfy t_n < t_next <= t_far, got ({t_n}, {t_next}, {t_far})"
        )
    g1 = gamma1(params, t_next - t_n)
    if t_far == t_next:
        return g1
    return params.phi ** (t_far - t_next) * g1


def autocorr(params: ModelParams, t_n: float, t_next: float, t_far: float) -> float:
    """Correlation counterpart of :func:`autocov`; always in (-1, 1]."""
    return autocov(params, t_n, t_next, t_far) / gamma0(params)


def lag1_autocorr(params: ModelParams, gap: float) -> float:
    """One-step autocorrelation phi**gap + theta**gap / c_1 for a given gap."""
    gap = float(gap)
    if gap < 1.0 - _GAP_TOL:
        raise TimeGridError(f"gap must be >= 1, got {gap:.6g}")
    return params.phi ** gap + params.theta ** gap / c1(params)


def simulate(params: ModelParams, times, seed: SeedLike = None) -> IrregularSeries:
    """Draw one exact Gaussian path of the process at the given times.

    Innovations are drawn as a single standard-normal vector scaled by
    sqrt(sigma2 * c_n), so identical (seed, times, params) yield
    bit-identical output.  The level mu is added at the end.

    Parameters
    ----------
    params : ModelParams
    times : array-like
        Strictly increasing observation times with all gaps >= 1.
    seed : int, SeedSequence, Generator, or None
        Source of randomness; None draws fresh OS entropy.
    """
    times = np.ascontiguousarray(times, dtype=np.float64)
    gaps = _check_gaps(np.diff(times))
    rng = _as_rng(seed)
    c = _cf_values(params.phi, params.theta, gaps)
    eps = rng.standard_normal(times.size) * np.sqrt(params.sigma2 * c)
    pp = params.phi ** gaps
    tp = params.theta ** gaps
    x = simulate_recursion(eps, pp, tp, c)
    return IrregularSeries(times, x + params.mu)


def sample_gaps(kind: str, n: int, seed: SeedLike = None, lam: float = 1.0) -> np.ndarray:
    """Draw ``n`` gaps from a named gap law.

    ``kind="regular"`` gives unit gaps; ``kind="exp"`` gives independent
    1 + Exponential(rate=lam) gaps, so every draw is >= 1 by construction
    and the mean gap is 1 + 1/lam.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if kind == "regular":
        return np.ones(n)
    if kind == "exp":
        if not (lam > 0.0 and math.isfinite(lam)):
            raise ParameterError(f"exponential rate must be > 0, got {lam}")
        return 1.0 + _as_rng(seed).exponential(scale=1.0 / lam, size=n)
    raise ParameterError(f"unknown gap law {kind!r} (expected 'regular' or 'exp')")


def times_from_gaps(gaps: Sequence[float], t_start: float = 1.0) -> np.ndarray:
    """Accumulate gaps into a time grid starting at ``t_start``."""
    gaps = np.asarray(gaps, dtype=np.float64)
    times = np.empty(gaps.size + 1)
    times[0] = t_start
    np.cumsum(gaps, out=times[1:])
    times[1:] += t_start
    return times
