"""Model fit diagnostics: goodness curves, effectiveness and heatmaps.

Goodness summarizes per-algorithm absolute residuals between observed and
model-predicted proportion-scale performance as an empirical CDF over a
tolerance grid. Effectiveness measures how often an algorithm is within a
tolerance of the per-instance best, computed both from observed and from
predicted performance; agreement between the two indicates a good fit.
Heatmaps tabulate the conditional density of performance given the trait.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit
from scipy.stats import norm

from .attributes import GRID_POINTS
from .crm import CrmParameters, TraitScores
from .errors import ValidationError
from .performance import ScaledMatrix


@dataclass(frozen=True)
class GoodnessResult:
    algorithm_names: tuple[str, ...]
    tolerances: np.ndarray
    residuals: np.ndarray
    curves: np.ndarray
    auc: np.ndarray


@dataclass(frozen=True)
class EffectivenessResult:
    algorithm_names: tuple[str, ...]
    tolerances: np.ndarray
    actual: np.ndarray
    predicted: np.ndarray
    auc_actual: np.ndarray
    auc_predicted: np.ndarray


@dataclass(frozen=True)
class HeatmapGrid:
    """Conditional densities f(z | theta) per algorithm.

    ``densities[j, zi, ti]`` is the density of performance ``z_grids[j, zi]``
    given trait ``theta_grid[ti]`` for algorithm j. The z grid is logistic-
    spaced so it tracks the ridge wherever it sits in (0, 1).
    """

    algorithm_names: tuple[str, ...]
    theta_grid: np.ndarray
    z_grids: np.ndarray
    densities: np.ndarray


def _values(z) -> np.ndarray:
    return np.asarray(z.values if isinstance(z, ScaledMatrix) else z, dtype=float)


def _check_pair(z, zhat) -> tuple[np.ndarray, np.ndarray]:
    zv, zh = _values(z), _values(zhat)
    if zv.shape != zh.shape:
        raise ValidationError(f"shape mismatch: {zv.shape} vs {zh.shape}")
    return zv, zh


def predict_performance(p: CrmParameters, t: TraitScores) -> ScaledMatrix:
    """Expected proportion-scale performance logistic(mu + lambda * theta)."""
    zhat = expit(p.mu + np.outer(t.theta, p.lam))
    ids = t.instance_ids or tuple(str(i + 1) for i in range(len(t.theta)))
    return ScaledMatrix(
        instance_ids=ids,
        algorithm_names=p.algorithm_names,
        values=zhat,
        clamped=np.clip(zhat, 0.005, 0.995),
        provenance=None,
    )


def _names_of(z, zhat, m: int) -> tuple[str, ...]:
    for source in (z, zhat):
        if isinstance(source, ScaledMatrix):
            return source.algorithm_names
    return tuple(f"algorithm_{j + 1}" for j in range(m))


def model_goodness(z, zhat) -> GoodnessResult:
    """Empirical CDF of absolute residuals |z - zhat| per algorithm."""
    zv, zh = _check_pair(z, zhat)
    residuals = np.abs(zv - zh)
    tolerances = np.linspace(0.0, 1.0, GRID_POINTS)
    curves = (residuals[None, :, :] <= tolerances[:, None, None]).mean(axis=1)
    auc = np.trapezoid(curves, tolerances, axis=0)
    return GoodnessResult(
        algorithm_names=_names_of(z, zhat, zv.shape[1]),
        tolerances=tolerances,
        residuals=residuals,
        curves=curves,
        auc=auc,
    )


def effectiveness_curves(z, zhat) -> EffectivenessResult:
    """Within-tolerance-of-best rates from observed and predicted values."""
    zv, zh = _check_pair(z, zhat)
    tolerances = np.linspace(0.0, 1.0, GRID_POINTS)

    def curve(values: np.ndarray) -> np.ndarray:
        best = values.max(axis=1, keepdims=True)
        return (
            values[None, :, :] >= best[None, :, :] - tolerances[:, None, None]
        ).mean(axis=1)

    actual = curve(zv)
    predicted = curve(zh)
    return EffectivenessResult(
        algorithm_names=_names_of(z, zhat, zv.shape[1]),
        tolerances=tolerances,
        actual=actual,
        predicted=predicted,
        auc_actual=np.trapezoid(actual, tolerances, axis=0),
        auc_predicted=np.trapezoid(predicted, tolerances, axis=0),
    )


def heatmap_density(
    p: CrmParameters, t: TraitScores, grid_points: int = GRID_POINTS
) -> HeatmapGrid:
    """Conditional density grids of performance given the trait.

    On the logit scale the response given theta is N(mu + lambda * theta,
    psi); the change of variables back to (0, 1) divides by z(1 - z). The z
    grid per algorithm is the logistic image of a uniform logit grid wide
    enough to cover the ridge over the whole observed trait span.
    """
    theta_grid = np.linspace(t.theta.min(), t.theta.max(), grid_points)
    m = p.n_algorithms
    z_grids = np.empty((m, grid_points))
    densities = np.empty((m, grid_points, grid_points))
    for j in range(m):
        center = p.mu[j] + p.lam[j] * theta_grid
        sd = float(np.sqrt(p.psi[j]))
        logit_grid = np.linspace(center.min() - 4 * sd, center.max() + 4 * sd, grid_points)
        z = expit(logit_grid)
        z_grids[j] = z
        with np.errstate(divide="ignore", over="ignore"):
            density = norm.pdf(logit_grid[:, None], center[None, :], sd) / (
                z * (1.0 - z)
            )[:, None]
        densities[j] = np.nan_to_num(density, nan=0.0, posinf=0.0)
    return HeatmapGrid(
        algorithm_names=p.algorithm_names,
        theta_grid=theta_grid,
        z_grids=z_grids,
        densities=densities,
    )
