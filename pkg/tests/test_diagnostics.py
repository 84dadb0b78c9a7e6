import numpy as np
import pytest
from scipy.special import expit

import oracles
from conftest import make_params
from irtfolio.crm import TraitScores, eap_scores, fit_crm, logit_transform, simulate_crm
from irtfolio.diagnostics import (
    effectiveness_curves,
    heatmap_density,
    model_goodness,
    predict_performance,
)
from irtfolio.errors import ValidationError


class TestPredictPerformance:
    def test_zero_logit_gives_one_half(self):
        p = make_params(mu=[0.0, 0.0], lam=[1.0, 1.0], psi=[0.5, 0.5])
        t = TraitScores(theta=np.zeros(3), theta_sd=np.ones(3))
        zhat = predict_performance(p, t)
        np.testing.assert_allclose(zhat.values, 0.5)

    def test_analytic_logistic_point(self):
        p = make_params(mu=[0.0], lam=[1.0], psi=[0.5])
        t = TraitScores(theta=np.array([np.log(9.0)]), theta_sd=np.ones(1))
        zhat = predict_performance(p, t)
        assert zhat.values[0, 0] == pytest.approx(0.9, abs=1e-12)

    def test_monotone_in_theta_by_loading_sign(self):
        p = make_params(mu=[0.2, 0.2], lam=[1.0, -1.0], psi=[0.5, 0.5])
        t = TraitScores(theta=np.linspace(-2, 2, 9), theta_sd=np.ones(9))
        zhat = predict_performance(p, t).values
        assert (np.diff(zhat[:, 0]) > 0).all()
        assert (np.diff(zhat[:, 1]) < 0).all()


class TestModelGoodness:
    def test_perfect_predictions(self):
        z = np.random.default_rng(0).uniform(0.1, 0.9, (30, 2))
        result = model_goodness(z, z)
        np.testing.assert_allclose(result.curves, 1.0)
        np.testing.assert_allclose(result.auc, 1.0)

    def test_uniform_half_residual_step(self):
        z = np.full((20, 2), 0.75)
        zhat = np.full((20, 2), 0.25)
        result = model_goodness(z, zhat)
        below = result.tolerances < 0.5
        assert (result.curves[below] == 0.0).all()
        assert (result.curves[~below] == 1.0).all()
        assert result.auc[0] == pytest.approx(0.5, abs=0.01)

    def test_auc_matches_independent_trapezoid(self):
        z = np.column_stack([[0.5, 0.7, 0.9], [0.2, 0.5, 0.8]])
        zhat = np.column_stack([[0.5, 0.5, 0.5], [0.2, 0.5, 0.8]])
        result = model_goodness(z, zhat)
        for j in range(2):
            expected = oracles.trapezoid_auc(result.tolerances, result.curves[:, j])
            assert result.auc[j] == pytest.approx(expected, abs=1e-12)

    def test_curves_nondecreasing_and_end_at_one(self):
        rng = np.random.default_rng(1)
        z = rng.uniform(0, 1, (50, 4))
        zhat = rng.uniform(0, 1, (50, 4))
        result = model_goodness(z, zhat)
        assert (np.diff(result.curves, axis=0) >= 0).all()
        np.testing.assert_array_equal(result.curves[-1], 1.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValidationError, match="shape"):
            model_goodness(np.zeros((3, 2)), np.zeros((2, 3)))


class TestEffectiveness:
    def test_dominant_algorithm(self):
        z = np.column_stack([np.full(25, 0.9), np.full(25, 0.4)])
        result = effectiveness_curves(z, z)
        assert result.actual[0, 0] == 1.0
        assert result.auc_actual[0] == pytest.approx(1.0)

    def test_uniform_gap_step(self):
        # 0.75 and 0.25 are exact binary fractions, as is the 0.5 grid point
        z = np.column_stack([np.full(25, 0.75), np.full(25, 0.25)])
        result = effectiveness_curves(z, z)
        below = result.tolerances < 0.5
        assert (result.actual[below, 1] == 0.0).all()
        assert (result.actual[~below, 1] == 1.0).all()

    def test_perfect_model_predicted_equals_actual(self):
        rng = np.random.default_rng(2)
        z = rng.uniform(0.05, 0.95, (40, 3))
        result = effectiveness_curves(z, z)
        np.testing.assert_array_equal(result.actual, result.predicted)
        np.testing.assert_array_equal(result.auc_actual, result.auc_predicted)

    def test_zero_tolerance_counts_row_maxima_with_ties(self):
        z = np.array([[0.5, 0.5], [0.8, 0.2], [0.3, 0.9]])
        result = effectiveness_curves(z, z)
        assert result.actual[0, 0] == pytest.approx(2 / 3)
        assert result.actual[0, 1] == pytest.approx(2 / 3)

    def test_curves_end_at_one(self):
        rng = np.random.default_rng(3)
        z = rng.uniform(0, 1, (30, 3))
        zhat = rng.uniform(0, 1, (30, 3))
        result = effectiveness_curves(z, zhat)
        np.testing.assert_array_equal(result.actual[-1], 1.0)
        np.testing.assert_array_equal(result.predicted[-1], 1.0)
        assert (np.diff(result.actual, axis=0) >= 0).all()
        assert (np.diff(result.predicted, axis=0) >= 0).all()


class TestHeatmapDensity:
    def fitted_case(self):
        true = make_params(
            mu=[0.3, -0.1, 0.2], lam=[0.7, 0.5, -0.6], psi=[0.25, 0.36, 0.3]
        )
        x = logit_transform(simulate_crm(150, true, seed=55))
        fit = fit_crm(x, true.algorithm_names)
        return fit, eap_scores(x, fit)

    def test_columns_integrate_to_one(self):
        fit, scores = self.fitted_case()
        grid = heatmap_density(fit, scores)
        for j in range(fit.n_algorithms):
            integrals = np.trapezoid(grid.densities[j], grid.z_grids[j], axis=0)
            assert np.abs(integrals - 1.0).max() < 1e-3

    def test_density_nonnegative_finite(self):
        fit, scores = self.fitted_case()
        grid = heatmap_density(fit, scores)
        assert (grid.densities >= 0).all()
        assert np.isfinite(grid.densities).all()

    def test_positive_loading_ridge_slopes_upward(self):
        p = make_params(mu=[0.0], lam=[0.8], psi=[0.2])
        t = TraitScores(theta=np.array([-2.0, 0.0, 2.0]), theta_sd=np.ones(3))
        grid = heatmap_density(p, t)
        ridge = grid.z_grids[0][np.argmax(grid.densities[0], axis=0)]
        assert (np.diff(ridge) >= 0).all()
        assert ridge[-1] > ridge[0]

    def test_negative_loading_ridge_slopes_downward(self):
        p = make_params(mu=[0.0], lam=[-0.8], psi=[0.2])
        t = TraitScores(theta=np.array([-2.0, 0.0, 2.0]), theta_sd=np.ones(3))
        grid = heatmap_density(p, t)
        ridge = grid.z_grids[0][np.argmax(grid.densities[0], axis=0)]
        assert ridge[-1] < ridge[0]

    def test_smaller_noise_sharpens_ridge(self):
        t = TraitScores(theta=np.linspace(-1.5, 1.5, 11), theta_sd=np.ones(11))
        wide = heatmap_density(make_params(mu=[0.0], lam=[0.6], psi=[0.4]), t)
        narrow = heatmap_density(make_params(mu=[0.0], lam=[0.6], psi=[0.2]), t)
        assert (
            narrow.densities[0].max(axis=0) > wide.densities[0].max(axis=0)
        ).all()

    def test_ridge_tracks_expected_performance(self):
        p = make_params(mu=[0.4], lam=[0.7], psi=[0.25])
        t = TraitScores(theta=np.linspace(-2, 2, 21), theta_sd=np.ones(21))
        grid = heatmap_density(p, t)
        ridge = grid.z_grids[0][np.argmax(grid.densities[0], axis=0)]
        expected = expit(0.4 + 0.7 * grid.theta_grid)
        assert np.abs(ridge - expected).max() < 0.05
