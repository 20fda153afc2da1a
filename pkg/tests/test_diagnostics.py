"""Residual diagnostics: ACF, Ljung-Box, QQ data."""

import math

import numpy as np
import pytest

from iarma import (
    DataError,
    ModelParams,
    ParameterError,
    acf,
    fit_ml,
    ljung_box,
    predict_innovations,
    qq_data,
    sample_gaps,
    simulate,
    times_from_gaps,
)
from iarma.diagnostics import _portmanteau


class TestAcf:
    def test_alternating_sign_negative_lag1(self):
        est = acf(np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0]), 1)
        assert est.rho[0] < 0.0

    def test_bounded_by_one(self):
        rng = np.random.default_rng(0)
        est = acf(rng.standard_normal(500), 30)
        assert np.all(np.abs(est.rho) <= 1.0)

    def test_white_noise_inside_three_sigma_band(self):
        x = np.random.default_rng(1).standard_normal(10_000)
        est = acf(x, 20)
        assert np.all(np.abs(est.rho) < 3.0 / math.sqrt(10_000))

    def test_band_value(self):
        est = acf(np.random.default_rng(2).standard_normal(400), 5)
        assert est.band == pytest.approx(1.959964 / 20.0, abs=1e-6)

    def test_constant_vector_rejected(self):
        with pytest.raises(DataError):
            acf(np.full(50, 2.0), 5)

    def test_max_lag_validation(self):
        x = np.zeros(30) + np.random.default_rng(3).standard_normal(30)
        with pytest.raises(ParameterError, match="max lag"):
            acf(x, 30)
        with pytest.raises(ParameterError):
            acf(x, 0)

    def test_shapes(self):
        est = acf(np.random.default_rng(4).standard_normal(100), 12)
        assert est.lags.tolist() == list(range(1, 13))
        assert est.rho.shape == (12,)


class TestLjungBox:
    def test_hand_value_single_lag(self):
        # rho_1 = 0.3 at n = 100: Q_1 = 100 * 102 * 0.09 / 99.
        q = _portmanteau(np.array([0.3]), 100)
        assert q[0] == pytest.approx(100.0 * 102.0 * 0.09 / 99.0, abs=1e-12)
        assert q[0] == pytest.approx(9.272727, abs=1e-5)

    def test_zero_autocorr_gives_zero_and_p_one(self):
        q = _portmanteau(np.zeros(5), 200)
        assert np.array_equal(q, np.zeros(5))
        from iarma.diagnostics import _chi2_sf

        assert np.allclose(_chi2_sf(q, np.arange(1.0, 6.0)), 1.0)

    def test_statistic_nondecreasing_and_p_in_unit_interval(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            res = ljung_box(rng.standard_normal(300), 15)
            assert np.all(np.diff(res.statistic) >= 0.0)
            assert np.all((res.p_value >= 0.0) & (res.p_value <= 1.0))

    def test_chi2_against_scipy(self):
        from scipy.stats import chi2

        from iarma.diagnostics import _chi2_sf

        q = np.array([0.5, 3.2, 11.7, 40.0])
        df = np.array([1.0, 4.0, 10.0, 25.0])
        assert np.max(np.abs(_chi2_sf(q, df) - chi2.sf(q, df))) < 1e-12

    def test_df_adjustment(self):
        x = np.random.default_rng(6).standard_normal(400)
        plain = ljung_box(x, 10)
        adj = ljung_box(x, 10, df_adjust=2)
        assert np.array_equal(plain.statistic, adj.statistic)
        assert np.all(np.isnan(adj.p_value[:2]))
        assert np.all(adj.df == plain.df - 2)
        # fewer dof makes the same statistic more extreme
        assert np.all(adj.p_value[2:] <= plain.p_value[2:] + 1e-12)

    def test_size_close_to_level(self):
        # Rejection rate of the h=10 test at the 5% level on white noise.
        rng = np.random.default_rng(7)
        reps, n = 500, 500
        rej = 0
        for _ in range(reps):
            res = ljung_box(rng.standard_normal(n), 10)
            rej += res.p_value[-1] < 0.05
        assert 0.02 <= rej / reps <= 0.09

    def test_detects_correlation(self):
        p = ModelParams(0.8, 0.0, 1.0)
        s = simulate(p, np.arange(1.0, 501.0), seed=8)
        res = ljung_box(s.values, 10)
        assert res.p_value[-1] < 1e-10


class TestQq:
    def test_symmetric_input(self):
        theo, sample = qq_data(np.array([-1.5, 0.0, 1.5]))
        assert np.allclose(sample, [-1.5, 0.0, 1.5])
        assert np.allclose(theo + theo[::-1], 0.0)

    def test_median_at_zero_for_odd_n(self):
        theo, _ = qq_data(np.random.default_rng(9).standard_normal(101))
        assert theo[50] == pytest.approx(0.0, abs=1e-14)

    def test_unit_slope_for_standard_normal(self):
        x = np.random.default_rng(10).standard_normal(20_000)
        theo, sample = qq_data(x)
        slope = np.polyfit(theo, sample, 1)[0]
        assert abs(slope - 1.0) < 0.05

    def test_plotting_positions(self):
        from scipy.special import ndtri

        theo, _ = qq_data(np.array([3.0, 1.0, 2.0, 0.0]))
        assert np.allclose(theo, ndtri((np.arange(1, 5) - 0.5) / 4.0))

    def test_too_short(self):
        with pytest.raises(ParameterError):
            qq_data(np.array([1.0]))


class TestResidualPipeline:
    def test_correct_fit_residuals_look_white(self):
        # Aggregated over replicates, at least ~95% of residual
        # autocorrelations should fall inside the white-noise band.
        p = ModelParams(0.5, 0.5, 1.0)
        rng = np.random.default_rng(11)
        inside = total = 0
        lb_pass = 0
        reps = 60
        for _ in range(reps):
            t = times_from_gaps(sample_gaps("exp", 299, seed=rng))
            s = simulate(p, t, seed=rng)
            fit = fit_ml(s, demean=False, compute_se=False)
            tr = predict_innovations(fit.params, s)
            est = acf(tr.std_resid, 20)
            inside += int(np.sum(np.abs(est.rho) <= est.band))
            total += 20
            lb_pass += ljung_box(tr.std_resid, 10).p_value[-1] >= 0.05
        assert inside / total >= 0.93
        assert lb_pass / reps >= 0.85

    def test_std_resid_variance_near_one_after_fit(self):
        p = ModelParams(0.4, 0.6, 2.0)
        s = simulate(p, times_from_gaps(sample_gaps("exp", 799, seed=12)), seed=13)
        fit = fit_ml(s, demean=False, compute_se=False)
        tr = predict_innovations(fit.params, s)
        assert np.mean(tr.std_resid ** 2) == pytest.approx(1.0, abs=1e-10)
