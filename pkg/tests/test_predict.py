"""One-step predictors: innovations form, state-space form, bands."""

import numpy as np
import pytest

from iarma import (
    IrregularSeries,
    ModelParams,
    ParameterError,
    forecast_bands,
    predict_innovations,
    predict_statespace,
    sample_gaps,
    simulate,
    times_from_gaps,
)

from .conftest import random_instance
from .oracles import innovations_algorithm, toeplitz_cov


class TestInnovations:
    def test_single_observation(self):
        p = ModelParams(0.5, 0.5, 1.0, mu=2.0)
        s = IrregularSeries([1.0], [3.5])
        tr = predict_innovations(p, s)
        assert tr.xhat[0] == 2.0
        assert tr.c[0] == pytest.approx(7.0 / 3.0)
        assert tr.resid[0] == pytest.approx(1.5)

    def test_pure_ar_reduction(self):
        # theta = 0: xhat_{n+1} = mu + phi**gap (x_n - mu).
        p = ModelParams(0.6, 0.0, 1.0, mu=1.0)
        s = simulate(p, times_from_gaps(sample_gaps("exp", 30, seed=0)), seed=1)
        tr = predict_innovations(p, s)
        want = p.mu + p.phi ** s.gaps * (s.values[:-1] - p.mu)
        assert np.max(np.abs(tr.xhat[1:] - want)) < 1e-14

    def test_white_noise_predictions_are_mu(self):
        p = ModelParams(0.0, 0.0, 1.0, mu=-2.0)
        s = simulate(p, np.arange(1.0, 51.0), seed=5)
        tr = predict_innovations(p, s)
        assert np.allclose(tr.xhat, -2.0)

    def test_regular_grid_matches_classical_innovations(self):
        # Unit gaps: predictions must match the textbook innovations
        # algorithm applied to the explicit Toeplitz ARMA(1,1) covariance.
        for phi, theta, seed in [(0.5, 0.5, 0), (0.8, 0.2, 1), (0.1, 0.9, 2)]:
            p = ModelParams(phi, theta, 1.3)
            n = 150
            s = simulate(p, np.arange(1.0, n + 1.0), seed=seed)
            tr = predict_innovations(p, s)
            v, xhat = innovations_algorithm(toeplitz_cov(phi, theta, p.sigma2, n), s.values)
            assert np.max(np.abs(tr.xhat - xhat)) < 1e-10
            assert np.max(np.abs(p.sigma2 * tr.c - v)) < 1e-10

    def test_std_resid_unit_variance_under_profile(self):
        p = ModelParams(0.5, 0.5, 2.0)
        s = simulate(p, times_from_gaps(sample_gaps("exp", 999, seed=3)), seed=4)
        tr = predict_innovations(p, s, profile_sigma2=True)
        assert tr.sigma2_source == "profile"
        assert np.mean(tr.std_resid ** 2) == pytest.approx(1.0, abs=1e-12)

    def test_supplied_sigma2_recorded(self):
        p = ModelParams(0.5, 0.5, 2.0)
        s = simulate(p, np.arange(1.0, 21.0), seed=9)
        tr = predict_innovations(p, s)
        assert tr.sigma2 == 2.0 and tr.sigma2_source == "supplied"
        assert np.allclose(tr.mse, 2.0 * tr.c)

    def test_orthogonality_to_past(self):
        # Residuals under the true parameters are uncorrelated with the
        # previous observation (within 3 / sqrt(N)).
        p = ModelParams(0.6, 0.4, 1.0)
        s = simulate(p, times_from_gaps(sample_gaps("exp", 9999, seed=6)), seed=7)
        tr = predict_innovations(p, s)
        r = np.corrcoef(tr.resid[1:], s.values[:-1])[0, 1]
        assert abs(r) < 3.0 / np.sqrt(len(s))

    def test_mse_calibration_over_replicates(self):
        # E[resid_n^2] = sigma2 c_n at every index, checked over replicates.
        p = ModelParams(0.5, 0.7, 1.0)
        t = times_from_gaps(sample_gaps("exp", 39, seed=10))
        reps = 2000
        sq = np.zeros(40)
        rng = np.random.default_rng(11)
        for _ in range(reps):
            s = simulate(p, t, seed=rng)
            tr = predict_innovations(p, s)
            sq += tr.resid ** 2
        mean_sq = sq / reps
        target = p.sigma2 * predict_innovations(p, simulate(p, t, seed=0)).c
        # resid^2 is sigma2 c_n times a chi-square(1): se = sqrt(2/reps) * target
        band = 4.0 * target * np.sqrt(2.0 / reps)
        assert np.all(np.abs(mean_sq - target) < band)

    def test_initial_condition_influence_decays(self):
        # Perturbing x_1 changes later predictions by at most
        # 2 * max(phi, theta) ** (t_n - t_1), vanishing for large n.
        for phi, theta in [(0.5, 0.5), (0.3, 0.8)]:
            p = ModelParams(phi, theta, 1.0)
            t = times_from_gaps(sample_gaps("exp", 120, seed=12))
            s = simulate(p, t, seed=13)
            bumped = IrregularSeries(s.times, s.values + np.eye(1, len(s), 0).ravel())
            d = np.abs(predict_innovations(p, bumped).xhat - predict_innovations(p, s).xhat)
            rate = max(phi, theta)
            envelope = 2.0 * rate ** (t - t[0])
            assert np.all(d[1:] <= envelope[1:] + 1e-15)
            assert d[-1] < 1e-10


class TestStateSpace:
    def test_single_observation(self):
        p = ModelParams(0.5, 0.5, 1.0, mu=4.0)
        state, tr = predict_statespace(p, IrregularSeries([2.0], [5.0]))
        assert state.alpha[0] == 0.0
        assert tr.xhat[0] == 4.0

    def test_white_noise_state_is_zero(self):
        p = ModelParams(0.0, 0.0, 1.0)
        s = simulate(p, np.arange(1.0, 31.0), seed=2)
        state, _ = predict_statespace(p, s)
        assert np.allclose(state.alpha, 0.0)

    def test_agrees_with_innovations_on_random_instances(self):
        rng = np.random.default_rng(21)
        worst = 0.0
        for _ in range(200):
            params, series = random_instance(rng, n_min=1, n_max=200, mu_range=3.0)
            tr1 = predict_innovations(params, series)
            _, tr2 = predict_statespace(params, series)
            worst = max(worst, float(np.max(np.abs(tr1.xhat - tr2.xhat))))
        assert worst < 1e-10

    def test_state_plus_mu_is_prediction(self):
        p = ModelParams(0.4, 0.6, 1.0, mu=2.5)
        s = simulate(p, times_from_gaps(sample_gaps("exp", 49, seed=14)), seed=15)
        state, tr = predict_statespace(p, s)
        assert np.allclose(state.alpha + p.mu, tr.xhat)


class TestForecastBands:
    def test_zero_coverage_degenerate(self):
        p = ModelParams(0.5, 0.5, 1.0)
        s = simulate(p, np.arange(1.0, 11.0), seed=1)
        tr = predict_innovations(p, s)
        lo, hi = forecast_bands(tr, p, coverage=0.0)
        assert np.array_equal(lo, tr.xhat) and np.array_equal(hi, tr.xhat)

    def test_two_sigma_quantile(self):
        # Coverage 2*Phi(2)-1 makes the half-width exactly 2 sqrt(mse).
        import math

        p = ModelParams(0.0, 0.0, 1.0)
        s = simulate(p, np.arange(1.0, 6.0), seed=2)
        tr = predict_innovations(p, s)
        coverage = math.erf(2.0 / math.sqrt(2.0))
        lo, hi = forecast_bands(tr, p, coverage=coverage)
        assert np.allclose((hi - lo) / 2.0, 2.0, atol=1e-12)

    def test_nested_in_coverage(self):
        p = ModelParams(0.5, 0.3, 2.0)
        s = simulate(p, np.arange(1.0, 21.0), seed=3)
        tr = predict_innovations(p, s)
        lo1, hi1 = forecast_bands(tr, p, coverage=0.5)
        lo2, hi2 = forecast_bands(tr, p, coverage=0.9)
        lo3, hi3 = forecast_bands(tr, p, coverage=0.99)
        assert np.all(lo3 < lo2) and np.all(lo2 < lo1)
        assert np.all(hi1 < hi2) and np.all(hi2 < hi3)

    @pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5])
    def test_invalid_coverage(self, bad):
        p = ModelParams(0.5, 0.5, 1.0)
        s = simulate(p, np.arange(1.0, 6.0), seed=4)
        tr = predict_innovations(p, s)
        with pytest.raises(ParameterError):
            forecast_bands(tr, p, coverage=bad)
