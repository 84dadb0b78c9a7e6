"""Algorithm attributes and the problem difficulty spectrum.

Three attributes summarize each fitted algorithm:

* anomalous — true when the loading is negative, i.e. the algorithm does
  better on harder instances;
* consistency — sqrt(psi) / |lambda|, the reciprocal absolute
  discrimination; higher means performance varies less across the
  difficulty range;
* difficulty limit — mu / lambda, the difficulty at which the expected
  proportion-scale performance crosses one half; the hardest problems the
  algorithm still handles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crm import CrmParameters, TraitScores
from .errors import AnalysisError

GRID_POINTS = 101
MIN_LOADING = 1e-8


@dataclass(frozen=True)
class AlgorithmAttributes:
    algorithm_names: tuple[str, ...]
    anomalous: np.ndarray
    consistency: np.ndarray
    difficulty_limit: np.ndarray


@dataclass(frozen=True)
class DifficultySpectrum:
    """Per-instance difficulties (-theta) and an evaluation grid over them."""

    difficulties: np.ndarray
    span: tuple[float, float]
    grid: np.ndarray


def derive_attributes(p: CrmParameters) -> AlgorithmAttributes:
    """Compute the attribute triple for every algorithm.

    Raises:
        AnalysisError: when a loading is too close to zero for the
            consistency and difficulty-limit ratios to mean anything.
    """
    tiny = np.abs(p.lam) < MIN_LOADING
    if tiny.any():
        name = p.algorithm_names[int(np.argmax(tiny))]
        raise AnalysisError(
            f"loading too small to derive attributes for algorithm {name!r}"
        )
    return AlgorithmAttributes(
        algorithm_names=p.algorithm_names,
        anomalous=p.lam < 0.0,
        consistency=np.sqrt(p.psi) / np.abs(p.lam),
        difficulty_limit=p.mu / p.lam,
    )


def difficulty_spectrum(t: TraitScores, grid_points: int = GRID_POINTS) -> DifficultySpectrum:
    """Negate easiness into difficulty and lay a uniform grid over its span.

    Raises:
        AnalysisError: when all trait scores coincide ("degenerate
            spectrum"), leaving no span to grid.
    """
    difficulties = -t.theta
    lo, hi = float(difficulties.min()), float(difficulties.max())
    if lo == hi:
        raise AnalysisError("degenerate spectrum: all instances share one difficulty")
    return DifficultySpectrum(
        difficulties=difficulties,
        span=(lo, hi),
        grid=np.linspace(lo, hi, grid_points),
    )
