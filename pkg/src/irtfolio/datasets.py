"""Bundled synthetic example datasets.

Each example is drawn from the response model itself with a fixed seed and
the generator parameters below, then rounded and shipped as CSV under
``irtfolio/data/`` next to a manifest. ``generate_example_csv`` reproduces
the shipped files byte for byte, which a test asserts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .crm import CrmParameters, simulate_crm
from .errors import ValidationError
from .performance import PerformanceMatrix, parse_csv


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    description: str
    algorithm_names: tuple[str, ...]
    n_instances: int
    seed: int
    mu: tuple[float, ...]
    lam: tuple[float, ...]
    psi: tuple[float, ...]
    value_scale: float = 1.0
    decimals: int = 6

    @property
    def filename(self) -> str:
        return f"{self.name}.csv"


_SPECS: dict[str, ExampleSpec] = {
    spec.name: spec
    for spec in (
        ExampleSpec(
            name="classification-demo",
            description="Accuracy-style proportions for eight classifiers; "
            "all respond positively to instance easiness.",
            algorithm_names=("cart", "knn", "lda", "nb", "qda", "rf", "svm", "xgb"),
            n_instances=200,
            seed=20240817,
            mu=(0.35, 0.1, 0.2, -0.15, 0.0, 0.4, 0.3, 0.25),
            lam=(0.75, 0.55, 0.65, 0.5, 0.6, 0.85, 0.8, 0.7),
            psi=(0.2, 0.3, 0.25, 0.36, 0.28, 0.16, 0.18, 0.22),
        ),
        ExampleSpec(
            name="anomalous-demo",
            description="Six solvers of which exactly one (solver_c) loads "
            "negatively: it shines on hard instances and fails on easy ones.",
            algorithm_names=(
                "solver_a",
                "solver_b",
                "solver_c",
                "solver_d",
                "solver_e",
                "solver_f",
            ),
            n_instances=150,
            seed=31415,
            mu=(0.25, 0.05, -0.1, 0.35, 0.0, 0.15),
            lam=(0.7, 0.55, -0.65, 0.8, 0.5, 0.75),
            psi=(0.2, 0.3, 0.24, 0.17, 0.32, 0.26),
        ),
        ExampleSpec(
            name="raw-accuracy-demo",
            description="Accuracies on a 0-100 scale; scaling must stay "
            "enabled to map them to proportions.",
            algorithm_names=("model_1", "model_2", "model_3", "model_4", "model_5"),
            n_instances=120,
            seed=2718,
            mu=(0.2, 0.4, -0.05, 0.45, 0.1),
            lam=(0.6, 0.7, 0.5, 0.8, 0.55),
            psi=(0.25, 0.2, 0.33, 0.17, 0.28),
            value_scale=100.0,
            decimals=4,
        ),
    )
}


def example_names() -> list[str]:
    return sorted(_SPECS)


def example_specs() -> list[ExampleSpec]:
    return [_SPECS[name] for name in example_names()]


def _spec(name: str) -> ExampleSpec:
    try:
        return _SPECS[name]
    except KeyError:
        raise ValidationError(
            f"unknown example {name!r}; available examples: {', '.join(example_names())}"
        ) from None


def generate_example_csv(name: str) -> str:
    """Regenerate an example CSV from its seed and generator parameters."""
    spec = _spec(name)
    params = CrmParameters(
        algorithm_names=spec.algorithm_names,
        mu=np.asarray(spec.mu),
        lam=np.asarray(spec.lam),
        psi=np.asarray(spec.psi),
        iterations=0,
        loglik_trace=np.zeros(1),
        converged=True,
    )
    z = simulate_crm(spec.n_instances, params, spec.seed).values * spec.value_scale
    lines = [",".join(spec.algorithm_names)]
    fmt = f"{{:.{spec.decimals}f}}"
    for row in z:
        lines.append(",".join(fmt.format(v) for v in row))
    return "\n".join(lines) + "\n"


def manifest() -> dict:
    """Machine-readable listing of the shipped examples."""
    return {
        spec.name: {
            "file": spec.filename,
            "n_instances": spec.n_instances,
            "n_algorithms": len(spec.algorithm_names),
            "seed": spec.seed,
            "description": spec.description,
            "generator": {
                "mu": list(spec.mu),
                "lambda": list(spec.lam),
                "psi": list(spec.psi),
                "value_scale": spec.value_scale,
                "decimals": spec.decimals,
            },
        }
        for spec in example_specs()
    }


def _data_dir():
    return resources.files("irtfolio") / "data"


def load_example(name: str) -> PerformanceMatrix:
    """Load a shipped example dataset by name.

    Raises:
        ValidationError: for unknown names, listing what is available.
    """
    spec = _spec(name)
    raw = (_data_dir() / spec.filename).read_bytes()
    return parse_csv(raw)


def example_csv_bytes(name: str) -> bytes:
    """Raw CSV bytes of a shipped example (as uploaded to the server)."""
    return (_data_dir() / _spec(name).filename).read_bytes()


def write_data_files(target_dir) -> None:
    """Write all example CSVs plus the manifest into a directory."""
    from pathlib import Path

    target = Path(target_dir)
    target.mkdir(parents=True, exist_ok=True)
    for spec in example_specs():
        (target / spec.filename).write_text(generate_example_csv(spec.name))
    (target / "manifest.json").write_text(
        json.dumps(manifest(), indent=2, sort_keys=True) + "\n"
    )
