import json

import numpy as np
import pytest

from irtfolio.attributes import derive_attributes
from irtfolio.crm import fit_crm, logit_transform
from irtfolio.datasets import (
    example_csv_bytes,
    example_names,
    example_specs,
    generate_example_csv,
    load_example,
    manifest,
)
from irtfolio.errors import ValidationError
from irtfolio.performance import TransformConfig, apply_transforms


def test_example_names_are_stable():
    assert example_names() == [
        "anomalous-demo",
        "classification-demo",
        "raw-accuracy-demo",
    ]


def test_unknown_example_lists_available():
    with pytest.raises(ValidationError, match="classification-demo"):
        load_example("nope")


def test_shipped_files_match_generators():
    for name in example_names():
        shipped = example_csv_bytes(name).decode()
        assert shipped == generate_example_csv(name), name


def test_manifest_matches_loaded_dimensions():
    m = manifest()
    for name in example_names():
        matrix = load_example(name)
        assert m[name]["n_instances"] == matrix.n_instances
        assert m[name]["n_algorithms"] == matrix.n_algorithms
        assert isinstance(m[name]["seed"], int)
    json.dumps(m)  # manifest must be JSON-serializable


def test_classification_demo_shape_and_range():
    matrix = load_example("classification-demo")
    assert (matrix.n_instances, matrix.n_algorithms) == (200, 8)
    assert matrix.values.min() >= 0.0
    assert matrix.values.max() <= 1.0


def test_raw_accuracy_demo_needs_scaling():
    matrix = load_example("raw-accuracy-demo")
    assert matrix.values.max() > 1.0
    assert matrix.values.max() <= 100.0
    with pytest.raises(ValidationError, match="outside"):
        apply_transforms(matrix, TransformConfig(scale=False))
    scaled = apply_transforms(matrix, TransformConfig(scale=True))
    assert scaled.values.max() <= 1.0


def test_anomalous_demo_flags_exactly_one_algorithm():
    matrix = load_example("anomalous-demo")
    scaled = apply_transforms(matrix, TransformConfig(scale=False))
    fit = fit_crm(logit_transform(scaled), matrix.algorithm_names)
    attrs = derive_attributes(fit)
    flagged = [n for n, a in zip(attrs.algorithm_names, attrs.anomalous) if a]
    assert flagged == ["solver_c"]


def test_examples_load_deterministically():
    a = load_example("classification-demo").values
    b = load_example("classification-demo").values
    np.testing.assert_array_equal(a, b)


def test_spec_parameters_have_consistent_lengths():
    for spec in example_specs():
        m = len(spec.algorithm_names)
        assert len(spec.mu) == len(spec.lam) == len(spec.psi) == m
