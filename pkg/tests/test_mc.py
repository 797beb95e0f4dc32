import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import ks_critical, ks_statistic
from gminlab.fitting import estimate_success_curve, fit_rate_parameter
from gminlab.mc import grover_success_prob, run_gmin_mc, survey_beta_gamma


class TestSuccessProb:
    def test_exact_case(self):
        assert grover_success_prob(1, 4, 1) == pytest.approx(1.0)

    def test_no_amplification(self):
        for k, N in ((1, 8), (3, 16), (5, 32)):
            assert grover_success_prob(k, N, 0) == pytest.approx(k / N)

    def test_empty_marked_set(self):
        for p in range(5):
            assert grover_success_prob(0, 64, p) == 0.0

    def test_all_marked(self):
        assert grover_success_prob(16, 16, 0) == pytest.approx(1.0)

    @given(st.integers(0, 32), st.integers(0, 6))
    def test_in_unit_interval(self, k, p):
        assert 0.0 <= grover_success_prob(k, 32, p) <= 1.0

    def test_range_errors(self):
        with pytest.raises(ValueError):
            grover_success_prob(9, 8, 0)
        with pytest.raises(ValueError):
            grover_success_prob(1, 8, -1)


class TestRunGminMc:
    def test_distribution_matches_full_simulator(self, ideal_n16_calls):
        mc = run_gmin_mc(16, rng=np.random.default_rng(52), trials=10_000)
        d = ks_statistic(ideal_n16_calls, mc)
        assert d < ks_critical(len(ideal_n16_calls), len(mc))

    def test_rate_parameter_window_large_n(self):
        calls = run_gmin_mc(1 << 16, rng=np.random.default_rng(1), trials=8000)
        fit = fit_rate_parameter(estimate_success_curve(calls, 1 << 16))
        assert 2.0 <= fit.a <= 4.0

    def test_beta_helps(self):
        N = 1 << 12
        lazy = run_gmin_mc(N, beta=0.0, rng=np.random.default_rng(2), trials=3000)
        tuned = run_gmin_mc(N, beta=0.95, rng=np.random.default_rng(3), trials=3000)
        assert tuned.mean() < lazy.mean()

    def test_fixed_start_at_minimum(self):
        calls = run_gmin_mc(16, rng=np.random.default_rng(4), trials=10, v=0)
        assert np.all(calls == 0)

    def test_curves_monotone(self):
        calls = run_gmin_mc(64, rng=np.random.default_rng(5), trials=2000)
        curve = estimate_success_curve(calls, 64)
        assert np.all(np.diff(curve.P) >= 0)

    def test_asymptotic_linearization_quality(self):
        N = 1 << 14
        calls = run_gmin_mc(N, rng=np.random.default_rng(6), trials=6000)
        fit = fit_rate_parameter(estimate_success_curve(calls, N))
        assert fit.r2 >= 0.99

    def test_sqrt_scaling(self):
        sizes = [1 << k for k in range(4, 13)]
        medians = []
        for i, N in enumerate(sizes):
            calls = run_gmin_mc(N, rng=np.random.default_rng(100 + i), trials=2500)
            medians.append(np.median(calls))
        slope = np.polyfit(np.log(sizes), np.log(medians), 1)[0]
        assert 0.45 <= slope <= 0.55


class TestSurvey:
    def test_rows_and_positivity(self):
        rows = survey_beta_gamma([0.9, 0.95], [1.1, 1.2], 1 << 8, 1500, seed=9)
        assert len(rows) == 4
        for beta, gamma, N, trials, fit in rows:
            assert fit.a > 0 and math.isfinite(fit.a)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            survey_beta_gamma([1.2], [1.1], 256, 10)
        with pytest.raises(ValueError):
            survey_beta_gamma([0.9], [1.5], 256, 10)

    def test_refit_stability_under_more_trials(self):
        for beta, gamma in ((0.9, 1.1), (0.95, 1.15), (0.85, 1.25)):
            small = survey_beta_gamma([beta], [gamma], 1 << 10, 4000, seed=31)[0][4]
            big = survey_beta_gamma([beta], [gamma], 1 << 10, 8000, seed=32)[0][4]
            assert abs(big.a - small.a) < 3.0 * (small.a_err + big.a_err) + 0.05 * small.a
