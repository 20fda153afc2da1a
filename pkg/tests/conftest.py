"""Shared helpers for drawing random test instances."""

from __future__ import annotations

import numpy as np
import pytest

from iarma import IrregularSeries, ModelParams, sample_gaps, simulate, times_from_gaps


def random_params(rng: np.random.Generator, mu_range: float = 0.0) -> ModelParams:
    """Random admissible parameters; each coefficient is exactly 0 with
    probability 0.1 so the degenerate submodels get exercised."""
    phi = 0.0 if rng.random() < 0.1 else rng.uniform(0.0, 0.95)
    theta = 0.0 if rng.random() < 0.1 else rng.uniform(0.0, 0.95)
    sigma2 = rng.uniform(0.25, 4.0)
    mu = rng.uniform(-mu_range, mu_range) if mu_range else 0.0
    return ModelParams(phi=phi, theta=theta, sigma2=sigma2, mu=mu)


def random_times(rng: np.random.Generator, n: int) -> np.ndarray:
    """Mix of regular and shifted-exponential grids, occasionally min-gap 1."""
    kind = rng.integers(3)
    if kind == 0 or n == 1:
        gaps = np.ones(n - 1)
    elif kind == 1:
        gaps = 1.0 + rng.exponential(scale=1.0 / rng.uniform(0.3, 3.0), size=n - 1)
    else:
        gaps = rng.uniform(1.0, 4.0, size=n - 1)
        if gaps.size:
            gaps[rng.integers(gaps.size)] = 1.0
    return times_from_gaps(gaps, t_start=float(rng.uniform(0.0, 5.0)))


def random_instance(
    rng: np.random.Generator, n_min: int = 1, n_max: int = 50, mu_range: float = 0.0
) -> tuple[ModelParams, IrregularSeries]:
    params = random_params(rng, mu_range=mu_range)
    n = int(rng.integers(n_min, n_max + 1))
    series = simulate(params, random_times(rng, n), seed=rng)
    return params, series


@pytest.fixture(scope="session")
def exp_series():
    """One medium-length simulated series on an exponential-gap grid."""
    params = ModelParams(phi=0.5, theta=0.5, sigma2=1.0)
    gaps = sample_gaps("exp", 499, seed=101)
    return params, simulate(params, times_from_gaps(gaps), seed=202)
