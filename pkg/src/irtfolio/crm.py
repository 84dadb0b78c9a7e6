"""Continuous response model for algorithm performance data.

Clamped proportion-scale performance is logit-transformed, giving per
algorithm j and instance i

    x[i, j] = mu[j] + lambda[j] * theta[i] + e[i, j],   e[i, j] ~ N(0, psi[j])

with a standard-normal instance easiness trait theta. Marginally the rows
are N(mu, lambda lambda' + diag(psi)), so the maximum-likelihood fit is a
one-factor covariance decomposition: mu is the column mean and (lambda, psi)
are estimated by EM on the sample covariance. Loadings may be negative,
which marks algorithms that do better the harder the instance is.

Derived item parameters follow the usual IRT conventions:
discrimination a = lambda / sqrt(psi), scaling alpha = |lambda|, and
easiness midpoint b = -mu / lambda (the trait value where the expected
response crosses one half).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import AnalysisError, DegenerateColumnError, FitError, ValidationError
from .performance import ScaledMatrix, TransformConfig

PSI_FLOOR = 1e-4
MAX_ITER = 2000
REL_TOL = 1e-8
_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class CrmParameters:
    """Fitted per-algorithm parameters plus fit metadata.

    ``lam`` is the signed latent loading (the name ``lambda`` is reserved in
    Python). ``loglik_trace`` holds the marginal log-likelihood after the
    initial guess and after every EM update; it is nondecreasing.
    """

    algorithm_names: tuple[str, ...]
    mu: np.ndarray
    lam: np.ndarray
    psi: np.ndarray
    iterations: int
    loglik_trace: np.ndarray
    converged: bool

    def __post_init__(self):
        object.__setattr__(self, "algorithm_names", tuple(self.algorithm_names))
        for name in ("mu", "lam", "psi", "loglik_trace"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        m = len(self.algorithm_names)
        if not (self.mu.shape == self.lam.shape == self.psi.shape == (m,)):
            raise ValidationError("parameter arrays must have one entry per algorithm")
        if (self.psi < PSI_FLOOR - 1e-12).any():
            raise ValidationError(f"psi entries must be at least {PSI_FLOOR}")

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithm_names)

    @property
    def a(self) -> np.ndarray:
        """Discrimination: loading in residual-standard-deviation units."""
        return self.lam / np.sqrt(self.psi)

    @property
    def alpha(self) -> np.ndarray:
        """Scaling: absolute loading."""
        return np.abs(self.lam)

    @property
    def b(self) -> np.ndarray:
        """Easiness midpoint; +/-inf where the loading vanishes."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.mu / self.lam

    @property
    def loglik(self) -> float:
        return float(self.loglik_trace[-1])


@dataclass(frozen=True)
class TraitScores:
    """Per-instance latent easiness (posterior mean and sd)."""

    theta: np.ndarray
    theta_sd: np.ndarray
    instance_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "theta_sd", np.asarray(self.theta_sd, dtype=float))

    @property
    def difficulty(self) -> np.ndarray:
        """Problem difficulty: the negation of easiness."""
        return -self.theta


def logit_transform(z: ScaledMatrix | np.ndarray) -> np.ndarray:
    """Elementwise ln(z / (1 - z)); uses the clamped values of a ScaledMatrix."""
    values = z.clamped if isinstance(z, ScaledMatrix) else np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        x = np.log(values) - np.log1p(-values)
    if not np.isfinite(x).all():
        raise AnalysisError(
            "logit produced non-finite values; inputs must lie strictly inside (0, 1)"
        )
    return x


def _column_names(m: int, names=None) -> tuple[str, ...]:
    if names is None:
        return tuple(f"algorithm_{j + 1}" for j in range(m))
    names = tuple(str(n) for n in names)
    if len(names) != m:
        raise ValidationError("algorithm_names length does not match matrix")
    return names


def _check_logit_matrix(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValidationError("logit matrix must be 2-D")
    if not np.isfinite(x).all():
        raise ValidationError("logit matrix contains non-finite values")
    return x


def _cov_loglik(C: np.ndarray, lam: np.ndarray, psi: np.ndarray, n: int) -> float:
    """Gaussian log-likelihood given the (mean-centered) sample covariance."""
    m = len(lam)
    w = lam / psi
    tau = 1.0 + lam @ w
    logdet = float(np.log(psi).sum() + np.log(tau))
    trace_term = float((np.diag(C) / psi).sum() - (w @ C @ w) / tau)
    return -0.5 * n * (m * _LOG_2PI + logdet + trace_term)


def _orient(v: np.ndarray) -> np.ndarray:
    total = v.sum()
    if total < 0 or (total == 0 and v[0] < 0):
        return -v
    return v


def fit_crm(
    x,
    algorithm_names=None,
    *,
    max_iter: int = MAX_ITER,
    rel_tol: float = REL_TOL,
    psi_floor: float = PSI_FLOOR,
) -> CrmParameters:
    """Fit the one-factor model to a logit-scale matrix by EM.

    The location mu is the column mean (its exact MLE). Loadings start from
    the first principal component of the sample covariance and psi from half
    the sample variances. Convergence is declared once the relative change
    in log-likelihood drops below ``rel_tol``; iteration then continues to
    the floating-point fixed point (zero change) so the returned parameters
    are a numerical stationary point, but never beyond ``max_iter`` total
    updates. The returned loadings are oriented so their sum is nonnegative.

    Raises:
        DegenerateColumnError: if any column is constant.
        FitError: if the sample covariance cannot be decomposed.
    """
    x = _check_logit_matrix(x)
    n, m = x.shape
    names = _column_names(m, algorithm_names)
    stds = x.std(axis=0)
    if (stds == 0.0).any():
        name = names[int(np.argmax(stds == 0.0))]
        raise DegenerateColumnError(f"degenerate algorithm column {name!r}")
    if n < 2 * m:
        warnings.warn(
            f"fitting {m} algorithms from only {n} instances; "
            "estimates are unstable below 2 instances per algorithm",
            UserWarning,
            stacklevel=2,
        )

    mu = x.mean(axis=0)
    xc = x - mu
    C = (xc.T @ xc) / n
    try:
        eigvals, eigvecs = np.linalg.eigh(C)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"numerically singular covariance: {exc}") from None
    if not np.isfinite(eigvals).all():
        raise FitError("numerically singular covariance")

    lead = _orient(eigvecs[:, -1])
    lam = lead * math.sqrt(max(eigvals[-1], psi_floor))
    psi = np.maximum(np.diag(C) / 2.0, psi_floor)
    diag_c = np.diag(C).copy()

    trace = [_cov_loglik(C, lam, psi, n)]
    converged = False
    for _ in range(max_iter):
        w = lam / psi
        tau = 1.0 + lam @ w
        beta = w / tau
        cb = C @ beta
        s2 = float(beta @ cb + 1.0 / tau)
        lam_next = cb / s2
        psi_next = np.maximum(diag_c - lam_next * cb, psi_floor)
        fixed_point = (lam_next == lam).all() and (psi_next == psi).all()
        lam, psi = lam_next, psi_next
        trace.append(_cov_loglik(C, lam, psi, n))
        rel = abs(trace[-1] - trace[-2]) / max(1.0, abs(trace[-2]))
        if rel < rel_tol:
            converged = True
        # iterate on to the floating-point fixed point: EM's linear rate
        # means small loglik steps do not yet imply a small gradient
        if fixed_point:
            break

    lam = _orient(lam)
    return CrmParameters(
        algorithm_names=names,
        mu=mu,
        lam=lam,
        psi=psi,
        iterations=len(trace) - 1,
        loglik_trace=np.asarray(trace),
        converged=converged,
    )


def marginal_loglik(x, p: CrmParameters, *, psi_floor: float = PSI_FLOOR) -> float:
    """Exact Gaussian marginal log-likelihood of a logit matrix under ``p``."""
    x = _check_logit_matrix(x)
    n, m = x.shape
    if m != p.n_algorithms:
        raise ValidationError(
            f"matrix has {m} columns but parameters cover {p.n_algorithms}"
        )
    if (p.psi < psi_floor - 1e-12).any():
        raise ValidationError(f"psi entries must be at least {psi_floor}")
    r = x - p.mu
    w = p.lam / p.psi
    tau = 1.0 + p.lam @ w
    quad = (r * r / p.psi).sum() - ((r @ w) ** 2).sum() / tau
    logdet = float(np.log(p.psi).sum() + np.log(tau))
    return -0.5 * (n * m * _LOG_2PI + n * logdet + float(quad))


def eap_scores(x, p: CrmParameters) -> TraitScores:
    """Posterior mean and sd of the latent easiness for every instance.

    The posterior is Gaussian with precision tau = 1 + sum_j lambda_j^2/psi_j,
    so the expected-a-posteriori score has the closed form
    theta_i = sum_j lambda_j (x_ij - mu_j) / psi_j / tau.
    """
    x = _check_logit_matrix(x)
    if x.shape[1] != p.n_algorithms:
        raise ValidationError(
            f"matrix has {x.shape[1]} columns but parameters cover {p.n_algorithms}"
        )
    w = p.lam / p.psi
    tau = 1.0 + p.lam @ w
    theta = (x - p.mu) @ w / tau
    sd = np.full(x.shape[0], 1.0 / math.sqrt(tau))
    return TraitScores(theta=theta, theta_sd=sd)


def simulate_crm(n: int, p: CrmParameters, seed: int) -> ScaledMatrix:
    """Draw n instances from the model and return logistic-scale performance.

    Deterministic per seed: the trait vector is drawn first, then the
    residual matrix row-major, both from ``numpy.random.default_rng(seed)``.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    rng = np.random.default_rng(seed)
    theta = rng.standard_normal(n)
    noise = rng.standard_normal((n, p.n_algorithms)) * np.sqrt(p.psi)
    x = p.mu + np.outer(theta, p.lam) + noise
    z = expit(x)
    eps = TransformConfig().clamp_eps
    return ScaledMatrix(
        instance_ids=tuple(str(i + 1) for i in range(n)),
        algorithm_names=p.algorithm_names,
        values=z,
        clamped=np.clip(z, eps, 1.0 - eps),
        provenance=None,
    )


class ContinuousResponseModel(TransformerMixin, BaseEstimator):
    """Scikit-learn estimator facade over the model fit.

    ``fit`` takes proportion-scale performance in (0, 1) (values outside
    the clamp band are clamped), ``transform`` returns the latent easiness
    scores as a column vector, ``predict`` the expected proportion-scale
    performance, and ``score`` the mean marginal log-likelihood per
    instance.
    """

    def __init__(
        self,
        max_iter: int = MAX_ITER,
        rel_tol: float = REL_TOL,
        psi_floor: float = PSI_FLOOR,
        clamp_eps: float = 0.005,
    ):
        self.max_iter = max_iter
        self.rel_tol = rel_tol
        self.psi_floor = psi_floor
        self.clamp_eps = clamp_eps

    def _logits(self, X) -> np.ndarray:
        X = check_array(X, dtype=float)
        if X.min() < 0.0 or X.max() > 1.0:
            raise ValidationError("performance values must lie within [0, 1]")
        return logit_transform(np.clip(X, self.clamp_eps, 1.0 - self.clamp_eps))

    def fit(self, X, y=None):
        x = self._logits(X)
        self.params_ = fit_crm(
            x,
            max_iter=self.max_iter,
            rel_tol=self.rel_tol,
            psi_floor=self.psi_floor,
        )
        self.n_features_in_ = x.shape[1]
        self.mu_ = self.params_.mu
        self.lambda_ = self.params_.lam
        self.psi_ = self.params_.psi
        self.a_ = self.params_.a
        self.alpha_ = self.params_.alpha
        self.b_ = self.params_.b
        self.converged_ = self.params_.converged
        self.n_iter_ = self.params_.iterations
        self.loglik_trace_ = self.params_.loglik_trace
        return self

    def _check_fitted_input(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        x = self._logits(X)
        if x.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"expected {self.n_features_in_} columns, got {x.shape[1]}"
            )
        return x

    def transform(self, X) -> np.ndarray:
        x = self._check_fitted_input(X)
        return eap_scores(x, self.params_).theta[:, None]

    def predict(self, X) -> np.ndarray:
        x = self._check_fitted_input(X)
        theta = eap_scores(x, self.params_).theta
        return expit(self.mu_ + np.outer(theta, self.lambda_))

    def score(self, X, y=None) -> float:
        x = self._check_fitted_input(X)
        return marginal_loglik(x, self.params_) / x.shape[0]
