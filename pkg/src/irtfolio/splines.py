"""Smoothing splines over the difficulty spectrum and the epsilon partition.

Each algorithm's proportion-scale performance is regressed on instance
difficulty with a cubic B-spline basis of fixed dimension (interior knots
at difficulty quantiles). The fitted curves, evaluated on the spectrum
grid, drive the strengths/weaknesses analysis: at every grid point the
algorithms within epsilon of the best (resp. worst) fitted value form the
good (resp. bad) set, and the fraction of grid points where an algorithm
appears in a set is its occupancy proportion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .attributes import DifficultySpectrum
from .errors import ValidationError
from .performance import ScaledMatrix

DEFAULT_DF = 8
_SPLINE_DEGREE = 3


@dataclass(frozen=True)
class SplineModel:
    """Per-algorithm spline fits evaluated on the difficulty grid."""

    algorithm_names: tuple[str, ...]
    grid: np.ndarray
    knots: np.ndarray
    coefficients: np.ndarray
    fitted: np.ndarray
    se: np.ndarray
    df: int


@dataclass(frozen=True)
class StrengthsWeaknesses:
    """Epsilon partition of the difficulty grid into good/bad sets."""

    algorithm_names: tuple[str, ...]
    epsilon: float
    grid: np.ndarray
    good: np.ndarray
    bad: np.ndarray
    strength_proportion: np.ndarray
    weakness_proportion: np.ndarray

    def good_set(self, g: int) -> set[str]:
        return {n for n, flag in zip(self.algorithm_names, self.good[g]) if flag}

    def bad_set(self, g: int) -> set[str]:
        return {n for n, flag in zip(self.algorithm_names, self.bad[g]) if flag}


def _knot_vector(difficulties: np.ndarray, span: tuple[float, float], df: int) -> np.ndarray:
    lo, hi = span
    n_interior = df - (_SPLINE_DEGREE + 1)
    if n_interior > 0:
        qs = np.arange(1, n_interior + 1) / (n_interior + 1)
        interior = np.quantile(difficulties, qs)
        margin = 1e-9 * (hi - lo)
        interior = np.clip(interior, lo + margin, hi - margin)
    else:
        interior = np.empty(0)
    return np.r_[
        np.full(_SPLINE_DEGREE + 1, lo), interior, np.full(_SPLINE_DEGREE + 1, hi)
    ]


def fit_splines(
    z: ScaledMatrix, s: DifficultySpectrum, df: int = DEFAULT_DF
) -> SplineModel:
    """Least-squares cubic B-spline fit of performance against difficulty.

    With fewer instances than basis functions the dimension drops to N - 2;
    below 6 instances there is nothing sensible to fit. Pointwise standard
    errors come from the usual linear-model covariance.
    """
    y = np.asarray(z.values, dtype=float)
    d = np.asarray(s.difficulties, dtype=float)
    n = y.shape[0]
    if d.shape != (n,):
        raise ValidationError("difficulties must pair with the matrix rows")
    if n < 6:
        raise ValidationError(f"need at least 6 instances to fit splines, got {n}")
    if n < 10:
        warnings.warn(
            f"spline fits from only {n} instances are unreliable",
            UserWarning,
            stacklevel=2,
        )
    if n < df:
        df = n - 2

    knots = _knot_vector(d, s.span, df)
    basis = BSpline.design_matrix(d, knots, _SPLINE_DEGREE, extrapolate=False).toarray()
    grid_basis = BSpline.design_matrix(
        s.grid, knots, _SPLINE_DEGREE, extrapolate=False
    ).toarray()

    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    residuals = y - basis @ coef
    if n > df:
        sigma2 = (residuals**2).sum(axis=0) / (n - df)
    else:
        sigma2 = np.zeros(y.shape[1])
    leverage = np.einsum(
        "ij,jk,ik->i", grid_basis, np.linalg.pinv(basis.T @ basis), grid_basis
    )
    se = np.sqrt(np.outer(np.maximum(leverage, 0.0), sigma2))

    return SplineModel(
        algorithm_names=z.algorithm_names,
        grid=np.asarray(s.grid, dtype=float),
        knots=knots,
        coefficients=coef,
        fitted=grid_basis @ coef,
        se=se,
        df=df,
    )


def partition_strengths_weaknesses(
    sp: SplineModel, epsilon: float
) -> StrengthsWeaknesses:
    """Good/bad sets at every grid point for a given goodness threshold.

    At epsilon 0 only the best (resp. worst) algorithms per grid point
    qualify, ties included; raising epsilon only ever grows the sets.
    """
    return partition_from_grid(
        sp.algorithm_names, sp.grid, sp.fitted, epsilon
    )


def partition_from_grid(
    algorithm_names, grid, fitted, epsilon: float
) -> StrengthsWeaknesses:
    """Partition arbitrary per-algorithm grid values (columns) by epsilon."""
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon}")
    fitted = np.asarray(fitted, dtype=float)
    good = fitted >= fitted.max(axis=1, keepdims=True) - epsilon
    bad = fitted <= fitted.min(axis=1, keepdims=True) + epsilon
    return StrengthsWeaknesses(
        algorithm_names=tuple(algorithm_names),
        epsilon=epsilon,
        grid=np.asarray(grid, dtype=float),
        good=good,
        bad=bad,
        strength_proportion=good.mean(axis=0),
        weakness_proportion=bad.mean(axis=0),
    )


def occupancy_table(sw: StrengthsWeaknesses) -> list[tuple[str, float, float]]:
    """Rows (algorithm, strength, weakness) sorted by strength, then name."""
    rows = [
        (name, float(s), float(w))
        for name, s, w in zip(
            sw.algorithm_names, sw.strength_proportion, sw.weakness_proportion
        )
    ]
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows
