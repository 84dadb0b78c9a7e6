"""Full-pipeline orchestration and serialization.

``run_analysis`` chains transform -> fit -> trait scores -> attributes ->
splines -> partition -> diagnostics into one bundle, addressed by a cache
key derived from the dataset content and every setting that influences the
numbers. The JSON payload built here is the single wire format: the CLI
writes it to disk, the HTTP API returns it, and plots render from it, so a
cached payload reproduces exactly what a fresh computation would.

Partitions are cheap and epsilon-dependent, so they are re-derived from the
payload's spline grid on demand (``with_epsilon``) instead of keyed into
the cache.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass

import numpy as np

from .attributes import (
    AlgorithmAttributes,
    DifficultySpectrum,
    derive_attributes,
    difficulty_spectrum,
)
from .crm import (
    MAX_ITER,
    PSI_FLOOR,
    REL_TOL,
    CrmParameters,
    TraitScores,
    eap_scores,
    fit_crm,
    logit_transform,
)
from .diagnostics import (
    EffectivenessResult,
    GoodnessResult,
    HeatmapGrid,
    effectiveness_curves,
    heatmap_density,
    model_goodness,
    predict_performance,
)
from .performance import (
    PerformanceMatrix,
    ScaledMatrix,
    TransformConfig,
    apply_transforms,
)
from .splines import (
    DEFAULT_DF,
    SplineModel,
    StrengthsWeaknesses,
    fit_splines,
    occupancy_table,
    partition_from_grid,
    partition_strengths_weaknesses,
)

PAYLOAD_SCHEMA = "irtfolio-analysis/1"


@dataclass
class AnalysisBundle:
    """Everything derived from one dataset + configuration."""

    source_name: str
    matrix: PerformanceMatrix
    config: TransformConfig
    epsilon: float
    scaled: ScaledMatrix
    params: CrmParameters
    traits: TraitScores
    attributes: AlgorithmAttributes
    spectrum: DifficultySpectrum
    splines: SplineModel
    partition: StrengthsWeaknesses
    goodness: GoodnessResult
    effectiveness: EffectivenessResult
    heatmaps: HeatmapGrid
    cache_key: str

    def to_payload(self) -> dict:
        return build_payload(self)


def matrix_digest(matrix: PerformanceMatrix) -> str:
    """Content digest of a performance matrix (labels + exact values)."""
    h = hashlib.sha256()
    h.update("\x1f".join(matrix.algorithm_names).encode())
    h.update(b"\x1e")
    h.update("\x1f".join(matrix.instance_ids).encode())
    h.update(b"\x1e")
    h.update(np.ascontiguousarray(matrix.values).tobytes())
    return h.hexdigest()


def compute_cache_key(
    dataset_digest: str,
    config: TransformConfig,
    *,
    spline_df: int = DEFAULT_DF,
    seed: int = 0,
) -> str:
    """Cache key over everything that changes the fitted numbers."""
    material = json.dumps(
        {
            "schema": PAYLOAD_SCHEMA,
            "dataset": dataset_digest,
            "transform": config.to_dict(),
            "model": {"max_iter": MAX_ITER, "rel_tol": REL_TOL, "psi_floor": PSI_FLOOR},
            "spline_df": spline_df,
            "seed": seed,
        },
        sort_keys=True,
    )
    return hashlib.sha256(material.encode()).hexdigest()


def run_analysis(
    matrix: PerformanceMatrix,
    config: TransformConfig | None = None,
    epsilon: float = 0.0,
    *,
    source_name: str = "dataset",
    spline_df: int = DEFAULT_DF,
    dataset_digest: str | None = None,
    seed: int = 0,
) -> AnalysisBundle:
    """Run the whole pipeline on a validated performance matrix."""
    config = config or TransformConfig()
    scaled = apply_transforms(matrix, config)
    x = logit_transform(scaled)
    params = fit_crm(x, matrix.algorithm_names)
    traits = eap_scores(x, params)
    traits = TraitScores(traits.theta, traits.theta_sd, matrix.instance_ids)
    attributes = derive_attributes(params)
    spectrum = difficulty_spectrum(traits)
    splines = fit_splines(scaled, spectrum, df=spline_df)
    partition = partition_strengths_weaknesses(splines, epsilon)
    zhat = predict_performance(params, traits)
    goodness = model_goodness(scaled, zhat)
    effectiveness = effectiveness_curves(scaled, zhat)
    heatmaps = heatmap_density(params, traits)
    key = compute_cache_key(
        dataset_digest or matrix_digest(matrix), config, spline_df=spline_df, seed=seed
    )
    return AnalysisBundle(
        source_name=source_name,
        matrix=matrix,
        config=config,
        epsilon=float(epsilon),
        scaled=scaled,
        params=params,
        traits=traits,
        attributes=attributes,
        spectrum=spectrum,
        splines=splines,
        partition=partition,
        goodness=goodness,
        effectiveness=effectiveness,
        heatmaps=heatmaps,
        cache_key=key,
    )


def _clean(value):
    """NumPy -> JSON-safe plain Python; non-finite floats become null."""
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else None
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    return value


def _per_algorithm(names, columns: np.ndarray) -> dict:
    return {name: _clean(columns[:, j]) for j, name in enumerate(names)}


def _partition_payload(partition: StrengthsWeaknesses) -> dict:
    names = partition.algorithm_names
    occupancy = [
        {
            "algorithm": name,
            "strength_proportion": strength,
            "weakness_proportion": weakness,
        }
        for name, strength, weakness in occupancy_table(partition)
    ]
    return {
        "partition": {
            "epsilon": partition.epsilon,
            "good": _per_algorithm(names, partition.good),
            "bad": _per_algorithm(names, partition.bad),
            "strength_proportion": {
                n: _clean(v) for n, v in zip(names, partition.strength_proportion)
            },
            "weakness_proportion": {
                n: _clean(v) for n, v in zip(names, partition.weakness_proportion)
            },
        },
        "occupancy": _clean(occupancy),
    }


def build_payload(bundle: AnalysisBundle) -> dict:
    names = bundle.matrix.algorithm_names
    params = bundle.params
    payload = {
        "schema": PAYLOAD_SCHEMA,
        "cache_key": bundle.cache_key,
        "epsilon": bundle.epsilon,
        "dataset": {
            "name": bundle.source_name,
            "instance_ids": list(bundle.matrix.instance_ids),
            "algorithms": list(names),
            "n_instances": bundle.matrix.n_instances,
            "n_algorithms": bundle.matrix.n_algorithms,
        },
        "transform": bundle.config.to_dict(),
        "performance": {"values": _clean(bundle.scaled.values)},
        "parameters": {
            "algorithms": {
                name: {
                    "mu": _clean(params.mu[j]),
                    "lambda": _clean(params.lam[j]),
                    "psi": _clean(params.psi[j]),
                    "a": _clean(params.a[j]),
                    "alpha": _clean(params.alpha[j]),
                    "b": _clean(params.b[j]),
                }
                for j, name in enumerate(names)
            },
            "converged": params.converged,
            "iterations": params.iterations,
            "loglik": _clean(params.loglik),
            "loglik_trace": _clean(params.loglik_trace),
        },
        "attributes": {
            name: {
                "anomalous": bool(bundle.attributes.anomalous[j]),
                "consistency": _clean(bundle.attributes.consistency[j]),
                "difficulty_limit": _clean(bundle.attributes.difficulty_limit[j]),
            }
            for j, name in enumerate(names)
        },
        "traits": {
            "theta": _clean(bundle.traits.theta),
            "theta_sd": _clean(bundle.traits.theta_sd),
            "difficulty": _clean(bundle.traits.difficulty),
        },
        "spectrum": {
            "span": [_clean(bundle.spectrum.span[0]), _clean(bundle.spectrum.span[1])],
            "grid": _clean(bundle.spectrum.grid),
        },
        "splines": {
            "df": bundle.splines.df,
            "fitted": _per_algorithm(names, bundle.splines.fitted),
            "se": _per_algorithm(names, bundle.splines.se),
        },
        "goodness": {
            "tolerances": _clean(bundle.goodness.tolerances),
            "curves": _per_algorithm(names, bundle.goodness.curves),
            "auc": {n: _clean(v) for n, v in zip(names, bundle.goodness.auc)},
        },
        "effectiveness": {
            "tolerances": _clean(bundle.effectiveness.tolerances),
            "actual": _per_algorithm(names, bundle.effectiveness.actual),
            "predicted": _per_algorithm(names, bundle.effectiveness.predicted),
            "auc_actual": {
                n: _clean(v) for n, v in zip(names, bundle.effectiveness.auc_actual)
            },
            "auc_predicted": {
                n: _clean(v)
                for n, v in zip(names, bundle.effectiveness.auc_predicted)
            },
        },
        "heatmaps": {
            "theta_grid": _clean(bundle.heatmaps.theta_grid),
            "algorithms": {
                name: {
                    "z_grid": _clean(bundle.heatmaps.z_grids[j]),
                    "density": _clean(bundle.heatmaps.densities[j]),
                }
                for j, name in enumerate(names)
            },
        },
    }
    payload.update(_partition_payload(bundle.partition))
    return payload


def with_epsilon(payload: dict, epsilon: float) -> dict:
    """Re-derive the partition and occupancy at a new epsilon.

    Works from the payload's spline grid values alone, so cached payloads
    serve any epsilon without refitting.
    """
    names = payload["dataset"]["algorithms"]
    fitted = np.column_stack([payload["splines"]["fitted"][n] for n in names])
    grid = np.asarray(payload["spectrum"]["grid"], dtype=float)
    partition = partition_from_grid(names, grid, fitted, epsilon)
    updated = dict(payload)
    updated["epsilon"] = float(epsilon)
    updated.update(_partition_payload(partition))
    return updated


def payload_json_bytes(payload: dict) -> bytes:
    """Canonical byte encoding: sorted keys, compact separators."""
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


def parameters_json_bytes(payload: dict) -> bytes:
    return (json.dumps(payload["parameters"], sort_keys=True, indent=2) + "\n").encode()


def _format_float(value) -> str:
    return "" if value is None else repr(float(value))


def attributes_csv_text(payload: dict) -> str:
    lines = ["algorithm,anomalous,consistency,difficulty_limit"]
    for name in payload["dataset"]["algorithms"]:
        attr = payload["attributes"][name]
        lines.append(
            ",".join(
                (
                    name,
                    "true" if attr["anomalous"] else "false",
                    _format_float(attr["consistency"]),
                    _format_float(attr["difficulty_limit"]),
                )
            )
        )
    return "\n".join(lines) + "\n"


def occupancy_csv_text(payload: dict) -> str:
    lines = ["algorithm,strength_proportion,weakness_proportion"]
    for row in payload["occupancy"]:
        lines.append(
            ",".join(
                (
                    row["algorithm"],
                    _format_float(row["strength_proportion"]),
                    _format_float(row["weakness_proportion"]),
                )
            )
        )
    return "\n".join(lines) + "\n"


def curves_csv_text(payload: dict, which: str) -> str:
    """Tolerance/value CSV for the diagnostic curves.

    ``which`` is one of "goodness", "effectiveness_actual" or
    "effectiveness_predicted"; columns are the tolerance grid followed by
    one column per algorithm.
    """
    sources = {
        "goodness": ("goodness", "curves"),
        "effectiveness_actual": ("effectiveness", "actual"),
        "effectiveness_predicted": ("effectiveness", "predicted"),
    }
    try:
        section, field = sources[which]
    except KeyError:
        raise ValueError(
            f"unknown curve set {which!r}; expected one of {sorted(sources)}"
        ) from None
    names = payload["dataset"]["algorithms"]
    tolerances = payload[section]["tolerances"]
    curves = payload[section][field]
    lines = [",".join(["tolerance", *names])]
    for i, tol in enumerate(tolerances):
        lines.append(
            ",".join([_format_float(tol), *(_format_float(curves[n][i]) for n in names)])
        )
    return "\n".join(lines) + "\n"


_SLUG_RE = re.compile(r"[^A-Za-z0-9._-]+")


def algorithm_slugs(names) -> dict[str, str]:
    """Deterministic filesystem-safe slug per algorithm name."""
    slugs: dict[str, str] = {}
    used: set[str] = set()
    for name in names:
        slug = _SLUG_RE.sub("_", name) or "algorithm"
        candidate, k = slug, 2
        while candidate in used:
            candidate = f"{slug}~{k}"
            k += 1
        used.add(candidate)
        slugs[name] = candidate
    return slugs
