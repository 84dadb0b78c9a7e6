import math

import numpy as np
import pytest
from scipy.stats import norm

import oracles
from conftest import make_params
from irtfolio.crm import (
    ContinuousResponseModel,
    eap_scores,
    fit_crm,
    logit_transform,
    marginal_loglik,
    simulate_crm,
)
from irtfolio.errors import AnalysisError, DegenerateColumnError, ValidationError
from irtfolio.performance import ScaledMatrix, TransformConfig, apply_transforms


class TestLogitTransform:
    def test_half_maps_to_zero(self):
        assert logit_transform(np.array([[0.5, 0.5]]))[0, 0] == 0.0

    def test_point_nine(self):
        x = logit_transform(np.array([[0.9, 0.5]]))
        assert x[0, 0] == pytest.approx(math.log(9.0), abs=1e-12)

    def test_clamped_extreme(self):
        # 1.0 clamped at eps=0.005 becomes 0.995 -> ln(199)
        x = logit_transform(np.array([[0.995, 0.5]]))
        assert x[0, 0] == pytest.approx(math.log(199.0), abs=1e-12)

    def test_uses_clamped_values_of_scaled_matrix(self):
        sm = ScaledMatrix(
            ("1", "2"),
            ("a", "b"),
            values=np.array([[0.0, 0.3], [1.0, 0.7]]),
            clamped=np.array([[0.005, 0.3], [0.995, 0.7]]),
            provenance=TransformConfig(),
        )
        x = logit_transform(sm)
        assert np.isfinite(x).all()
        assert x[1, 0] == pytest.approx(math.log(199.0))

    def test_exact_zero_or_one_rejected(self):
        with pytest.raises(AnalysisError, match="strictly inside"):
            logit_transform(np.array([[0.0, 0.5]]))


class TestFitRecovery:
    def test_loadings_recovered(self, recovery_case):
        fit, true = recovery_case["fit"], recovery_case["true"]
        corr = np.corrcoef(fit.lam, true.lam)[0, 1]
        assert corr > 0.98
        assert fit.converged

    def test_midpoints_recovered_for_strong_loadings(self, recovery_case):
        fit, true = recovery_case["fit"], recovery_case["true"]
        strong = np.abs(true.lam) >= 1.0
        assert np.abs(fit.b - true.b)[strong].max() < 0.15

    def test_negative_loading_recovered(self, recovery_case):
        fit, true = recovery_case["fit"], recovery_case["true"]
        assert ((fit.lam < 0) == (true.lam < 0)).all()

    def test_sign_convention(self, recovery_case):
        assert recovery_case["fit"].lam.sum() >= 0.0

    def test_trace_monotone(self, recovery_case):
        diffs = np.diff(recovery_case["fit"].loglik_trace)
        assert diffs.min() >= -1e-9

    def test_mu_is_column_mean(self, recovery_case):
        np.testing.assert_allclose(
            recovery_case["fit"].mu, recovery_case["x"].mean(axis=0), atol=1e-12
        )

    def test_deterministic(self, recovery_case):
        again = fit_crm(recovery_case["x"], recovery_case["true"].algorithm_names)
        assert (again.lam == recovery_case["fit"].lam).all()
        assert (again.psi == recovery_case["fit"].psi).all()


class TestFitAgainstGridSearch:
    def test_em_matches_exhaustive_grid_on_two_columns(self):
        true = make_params(mu=[0.2, -0.1], lam=[0.9, 0.7], psi=[0.8, 1.0])
        x = logit_transform(simulate_crm(50, true, seed=424242))
        fit = fit_crm(x, ("p", "q"))
        n = x.shape[0]
        xc = x - x.mean(axis=0)
        C = xc.T @ xc / n
        grid_best = oracles.grid_search_two_columns(C, n)
        em_loglik = marginal_loglik(x, fit)
        assert em_loglik >= grid_best - 1e-9
        assert abs(em_loglik - grid_best) < 1e-3


class TestFitValidation:
    def test_constant_column_rejected(self):
        x = np.column_stack([np.zeros(30), np.linspace(-1, 1, 30)])
        with pytest.raises(DegenerateColumnError, match="degenerate algorithm column"):
            fit_crm(x, ("flat", "ok"))

    def test_warning_when_instances_scarce(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((5, 3))
        with pytest.warns(UserWarning, match="unstable"):
            fit_crm(x)

    def test_nonfinite_rejected(self):
        x = np.array([[0.0, 1.0], [np.inf, 2.0]])
        with pytest.raises(ValidationError, match="non-finite"):
            fit_crm(x)

    def test_psi_floor_respected(self, recovery_case):
        from irtfolio.crm import PSI_FLOOR

        assert (recovery_case["fit"].psi >= PSI_FLOOR).all()


class TestMarginalLoglik:
    def test_single_column_reduces_to_univariate_normal(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((40, 1)) * 1.3 + 0.4
        p = make_params(mu=[0.4], lam=[1.0], psi=[0.69])
        variance = 1.0**2 + 0.69
        expected = norm.logpdf(x[:, 0], loc=0.4, scale=math.sqrt(variance)).sum()
        assert marginal_loglik(x, p) == pytest.approx(expected, abs=1e-9)

    def test_matches_quadrature_on_small_matrix(self):
        p = make_params(mu=[0.2, -0.4, 0.1], lam=[0.8, -0.5, 1.1], psi=[0.7, 1.2, 0.9])
        z = simulate_crm(5, p, seed=99)
        x = logit_transform(z)
        exact = marginal_loglik(x, p)
        quad = oracles.gh_marginal_loglik(x, p.mu, p.lam, p.psi)
        assert exact == pytest.approx(quad, abs=1e-8)

    def test_psi_below_floor_rejected(self):
        p = make_params(mu=[0.0, 0.0], lam=[1.0, 1.0], psi=[1.0, 1.0])
        object.__setattr__(p, "psi", np.array([1e-6, 1.0]))
        with pytest.raises(ValidationError, match="psi"):
            marginal_loglik(np.zeros((3, 2)), p)

    def test_dimension_mismatch(self):
        p = make_params(mu=[0.0], lam=[1.0], psi=[1.0])
        with pytest.raises(ValidationError, match="columns"):
            marginal_loglik(np.zeros((3, 2)), p)


class TestEmMonotonicity:
    @pytest.mark.parametrize("seed", range(20))
    def test_trace_nondecreasing_across_seeds(self, seed):
        rng = np.random.default_rng(seed)
        m = int(rng.integers(3, 7))
        true = make_params(
            mu=rng.uniform(-1, 1, m),
            lam=rng.uniform(0.5, 1.8, m) * rng.choice([-1.0, 1.0], m),
            psi=rng.uniform(0.2, 1.0, m),
        )
        x = logit_transform(simulate_crm(120, true, seed=int(seed) + 1000))
        fit = fit_crm(x)
        assert np.diff(fit.loglik_trace).min() >= -1e-9


class TestGradientAtOptimum:
    def test_finite_difference_gradient_vanishes(self, recovery_case):
        fit, x = recovery_case["fit"], recovery_case["x"]
        assert fit.converged
        h = 1e-5
        worst = 0.0
        for j in range(fit.n_algorithms):
            for attr in ("lam", "psi"):
                plus = {"lam": fit.lam.copy(), "psi": fit.psi.copy()}
                minus = {"lam": fit.lam.copy(), "psi": fit.psi.copy()}
                plus[attr][j] += h
                minus[attr][j] -= h
                up = marginal_loglik(x, make_params(fit.mu, plus["lam"], plus["psi"]))
                down = marginal_loglik(x, make_params(fit.mu, minus["lam"], minus["psi"]))
                worst = max(worst, abs((up - down) / (2 * h)))
        assert worst < 1e-4


class TestEapScores:
    def test_zero_observation_gives_zero_score(self):
        p = make_params(mu=[0.0], lam=[1.0], psi=[1.0])
        scores = eap_scores(np.array([[0.0]]), p)
        assert scores.theta[0] == 0.0

    def test_single_algorithm_closed_form(self):
        # posterior precision 2, mean x/2
        p = make_params(mu=[0.0], lam=[1.0], psi=[1.0])
        scores = eap_scores(np.array([[1.0]]), p)
        assert scores.theta[0] == pytest.approx(0.5, abs=1e-12)
        assert scores.theta_sd[0] == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)

    def test_two_algorithm_closed_form(self):
        p = make_params(mu=[0.0, 0.0], lam=[1.0, 2.0], psi=[1.0, 1.0])
        scores = eap_scores(np.array([[1.0, 1.0]]), p)
        assert scores.theta[0] == pytest.approx(0.5, abs=1e-12)

    def test_matches_quadrature_on_random_draws(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(100):
            m = int(rng.integers(1, 5))
            lam = rng.uniform(0.3, 1.2, m) * rng.choice([-1.0, 1.0], m)
            mu = rng.uniform(-1.0, 1.0, m)
            psi = rng.uniform(0.6, 2.0, m)
            p = make_params(mu, lam, psi)
            x_row = mu + lam * rng.standard_normal() + rng.standard_normal(m) * np.sqrt(psi)
            closed = eap_scores(x_row[None, :], p).theta[0]
            quad = oracles.gh_posterior_mean(x_row, mu, lam, psi)
            worst = max(worst, abs(closed - quad))
        assert worst < 1e-6

    def test_monotone_in_each_positive_loading_coordinate(self):
        p = make_params(mu=[0.1, -0.2, 0.3], lam=[0.8, 1.1, 0.5], psi=[0.5, 0.7, 1.0])
        base = np.array([[0.2, -0.1, 0.4]])
        theta0 = eap_scores(base, p).theta[0]
        for j in range(3):
            bumped = base.copy()
            bumped[0, j] += 0.25
            assert eap_scores(bumped, p).theta[0] > theta0

    def test_difficulty_reverses_theta(self):
        p = make_params(mu=[0.0, 0.0], lam=[1.0, 1.0], psi=[0.5, 0.5])
        x = np.array([[1.0, 0.5], [-0.5, 0.0], [2.0, 1.5]])
        scores = eap_scores(x, p)
        np.testing.assert_array_equal(scores.difficulty, -scores.theta)
        assert (scores.theta_sd > 0).all()


class TestDerivedParameters:
    def test_discrimination_scale_invariance(self):
        p1 = make_params(mu=[0.0, 0.0], lam=[1.0, -0.5], psi=[0.4, 0.9])
        c = 3.0
        p2 = make_params(mu=[0.0, 0.0], lam=[c * 1.0, c * -0.5], psi=[c**2 * 0.4, c**2 * 0.9])
        np.testing.assert_allclose(p1.a, p2.a, rtol=1e-12)

    def test_discrimination_sign_matches_loading(self, recovery_case):
        fit = recovery_case["fit"]
        np.testing.assert_array_equal(np.sign(fit.a), np.sign(fit.lam))

    def test_alpha_is_absolute_loading(self, recovery_case):
        fit = recovery_case["fit"]
        np.testing.assert_array_equal(fit.alpha, np.abs(fit.lam))


class TestSimulate:
    def test_values_strictly_inside_unit_interval(self):
        p = make_params(mu=[0.0, 1.0], lam=[1.0, -1.0], psi=[0.5, 0.5])
        z = simulate_crm(200, p, seed=5)
        assert (z.values > 0.0).all() and (z.values < 1.0).all()
        assert z.values.shape == (200, 2)

    def test_deterministic_per_seed(self):
        p = make_params(mu=[0.0, 1.0], lam=[1.0, -1.0], psi=[0.5, 0.5])
        a = simulate_crm(50, p, seed=9).values
        b = simulate_crm(50, p, seed=9).values
        assert (a == b).all()
        c = simulate_crm(50, p, seed=10).values
        assert (a != c).any()

    def test_negative_loading_column_anticorrelates_with_trait(self):
        p = make_params(mu=[0.0, 0.0], lam=[1.2, -1.2], psi=[0.3, 0.3])
        seed = 77
        z = simulate_crm(1000, p, seed=seed)
        # the trait vector is drawn first from the same generator
        theta = np.random.default_rng(seed).standard_normal(1000)
        assert np.corrcoef(theta, z.values[:, 0])[0, 1] > 0.5
        assert np.corrcoef(theta, z.values[:, 1])[0, 1] < -0.5

    def test_round_trip_through_fit(self, recovery_case):
        # simulate -> fit -> simulate from the fit stays on the same scale
        refit_sim = simulate_crm(400, recovery_case["fit"], seed=4)
        assert abs(refit_sim.values.mean() - recovery_case["z"].values.mean()) < 0.05

    def test_invalid_n(self):
        p = make_params(mu=[0.0], lam=[1.0], psi=[0.5])
        with pytest.raises(ValidationError):
            simulate_crm(0, p, seed=1)


class TestEstimatorApi:
    def test_fit_transform_predict_shapes(self):
        true = make_params(mu=[0.2, -0.1, 0.4], lam=[0.9, 0.7, 1.1], psi=[0.4, 0.6, 0.3])
        z = simulate_crm(80, true, seed=21).values
        model = ContinuousResponseModel().fit(z)
        assert model.lambda_.shape == (3,)
        theta = model.transform(z)
        assert theta.shape == (80, 1)
        predictions = model.predict(z)
        assert predictions.shape == (80, 3)
        assert ((predictions > 0) & (predictions < 1)).all()
        assert np.isfinite(model.score(z))

    def test_get_params_set_params(self):
        model = ContinuousResponseModel(max_iter=50)
        assert model.get_params()["max_iter"] == 50
        model.set_params(rel_tol=1e-6)
        assert model.rel_tol == 1e-6

    def test_unfitted_raises(self):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            ContinuousResponseModel().transform(np.full((2, 2), 0.5))

    def test_performance_outside_unit_interval_rejected(self):
        with pytest.raises(ValidationError, match=r"\[0, 1\]"):
            ContinuousResponseModel().fit(np.array([[0.5, 1.5], [0.4, 0.6]]))

    def test_pipeline_composition(self):
        from sklearn.pipeline import Pipeline

        from irtfolio.performance import PerformanceScaler

        true = make_params(mu=[0.2, -0.1, 0.4], lam=[0.9, 0.7, 1.1], psi=[0.4, 0.6, 0.3])
        raw = simulate_crm(60, true, seed=3).values * 100.0
        pipe = Pipeline(
            [("scale", PerformanceScaler()), ("irt", ContinuousResponseModel())]
        )
        theta = pipe.fit_transform(raw)
        assert theta.shape == (60, 1)
