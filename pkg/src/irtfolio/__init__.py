"""Item-response-theory analysis of algorithm portfolio benchmarks.

Fit a continuous response model to an instances x algorithms performance
matrix, score per-instance difficulty, derive per-algorithm attributes
(anomalousness, consistency, difficulty limit), and map each algorithm's
strengths and weaknesses across the difficulty spectrum.
"""

from .attributes import (
    AlgorithmAttributes,
    DifficultySpectrum,
    derive_attributes,
    difficulty_spectrum,
)
from .bundle import AnalysisBundle, run_analysis
from .crm import (
    ContinuousResponseModel,
    CrmParameters,
    TraitScores,
    eap_scores,
    fit_crm,
    logit_transform,
    marginal_loglik,
    simulate_crm,
)
from .datasets import example_names, load_example
from .diagnostics import (
    EffectivenessResult,
    GoodnessResult,
    HeatmapGrid,
    effectiveness_curves,
    heatmap_density,
    model_goodness,
    predict_performance,
)
from .errors import AnalysisError, DegenerateColumnError, FitError, ValidationError
from .performance import (
    PerformanceMatrix,
    PerformanceScaler,
    ScaledMatrix,
    TransformConfig,
    apply_transforms,
    parse_csv,
)
from .splines import (
    SplineModel,
    StrengthsWeaknesses,
    fit_splines,
    occupancy_table,
    partition_strengths_weaknesses,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmAttributes",
    "AnalysisBundle",
    "AnalysisError",
    "ContinuousResponseModel",
    "CrmParameters",
    "DegenerateColumnError",
    "DifficultySpectrum",
    "EffectivenessResult",
    "FitError",
    "GoodnessResult",
    "HeatmapGrid",
    "PerformanceMatrix",
    "PerformanceScaler",
    "ScaledMatrix",
    "SplineModel",
    "StrengthsWeaknesses",
    "TraitScores",
    "TransformConfig",
    "ValidationError",
    "apply_transforms",
    "derive_attributes",
    "difficulty_spectrum",
    "eap_scores",
    "effectiveness_curves",
    "example_names",
    "fit_crm",
    "fit_splines",
    "heatmap_density",
    "load_example",
    "logit_transform",
    "marginal_loglik",
    "model_goodness",
    "occupancy_table",
    "parse_csv",
    "partition_strengths_weaknesses",
    "predict_performance",
    "run_analysis",
    "simulate_crm",
]
