"""Performance matrix ingestion, validation and scaling.

The pipeline consumes an instances x algorithms matrix of raw performance
values (accuracy, runtime, error, ...). Before model fitting the values are
mapped to proportions: optionally inverted (for "lower is better" metrics),
scaled to [0, 1], and clamped into the open interval so that a logit
transform stays finite. The transform order is invert -> scale -> clamp.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .errors import DegenerateColumnError, ValidationError

SCALE_BY_CHOICES = ("column", "global")


@dataclass(frozen=True)
class PerformanceMatrix:
    """Raw performance values with instance and algorithm labels."""

    instance_ids: tuple[str, ...]
    algorithm_names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "instance_ids", tuple(self.instance_ids))
        object.__setattr__(self, "algorithm_names", tuple(self.algorithm_names))
        if values.ndim != 2:
            raise ValidationError("performance values must form a 2-D matrix")
        n, m = values.shape
        if n < 2:
            raise ValidationError(f"need at least 2 instances, got {n}")
        if m < 2:
            raise ValidationError(f"need at least 2 algorithms, got {m}")
        if len(self.instance_ids) != n:
            raise ValidationError("instance_ids length does not match matrix")
        if len(self.algorithm_names) != m:
            raise ValidationError("algorithm_names length does not match matrix")
        for name in self.algorithm_names:
            if not name:
                raise ValidationError("algorithm names must be non-empty")
        if len(set(self.algorithm_names)) != m:
            raise ValidationError("algorithm names must be unique")
        if not np.isfinite(values).all():
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise ValidationError(
                f"non-finite value at data row {i + 1}, "
                f"column {self.algorithm_names[j]!r}"
            )

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_algorithms(self) -> int:
        return self.values.shape[1]


def parse_csv(raw: bytes | str, *, id_column: bool = False) -> PerformanceMatrix:
    """Parse a UTF-8 CSV with a header of algorithm names and numeric rows.

    Instance ids default to "1".."N"; with ``id_column=True`` the first
    column holds instance labels instead of numeric data.

    Raises:
        ValidationError: on undecodable bytes, a malformed header, ragged
            rows, non-numeric or non-finite cells (naming the data row and
            column), or a matrix smaller than 2x2.
    """
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValidationError(f"input is not valid UTF-8: {exc}") from None
    else:
        text = raw

    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise ValidationError("empty CSV input")

    header = [name.strip() for name in rows[0]]
    if id_column:
        if len(header) < 2:
            raise ValidationError("id column requested but header has one field")
        header = header[1:]

    for name in header:
        if not name:
            raise ValidationError("header contains an empty algorithm name")
    if len(set(header)) != len(header):
        dupes = sorted({n for n in header if header.count(n) > 1})
        raise ValidationError(f"duplicate algorithm names in header: {dupes}")
    if len(header) < 2:
        raise ValidationError(f"need at least 2 algorithm columns, got {len(header)}")

    data_rows = rows[1:]
    if len(data_rows) < 2:
        raise ValidationError(f"need at least 2 data rows, got {len(data_rows)}")

    instance_ids: list[str] = []
    values = np.empty((len(data_rows), len(header)), dtype=float)
    expected = len(header) + (1 if id_column else 0)
    for r, row in enumerate(data_rows, start=1):
        if len(row) != expected:
            raise ValidationError(
                f"data row {r} has {len(row)} fields, expected {expected}"
            )
        if id_column:
            instance_ids.append(row[0].strip())
            cells = row[1:]
        else:
            instance_ids.append(str(r))
            cells = row
        for c, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                value = math.nan
            if not math.isfinite(value):
                raise ValidationError(
                    f"non-numeric value {cell.strip()!r} at data row {r}, "
                    f"column {header[c]!r}"
                )
            values[r - 1, c] = value

    return PerformanceMatrix(tuple(instance_ids), tuple(header), values)


@dataclass(frozen=True)
class TransformConfig:
    """How raw performance values are mapped to clamped proportions.

    ``min_item``/``max_item`` may be scalars or per-algorithm sequences and
    only take effect when ``scale`` is off, in which case every value must
    already lie inside those bounds.
    """

    scale: bool = True
    invert: bool = False
    scale_by: str = "column"
    min_item: float | tuple[float, ...] = 0.0
    max_item: float | tuple[float, ...] = 1.0
    clamp_eps: float = 0.005

    def __post_init__(self):
        if self.scale_by not in SCALE_BY_CHOICES:
            raise ValidationError(
                f"scale_by must be one of {SCALE_BY_CHOICES}, got {self.scale_by!r}"
            )
        if not 0.0 < self.clamp_eps < 0.5:
            raise ValidationError("clamp_eps must lie strictly between 0 and 0.5")
        for attr in ("min_item", "max_item"):
            value = getattr(self, attr)
            if isinstance(value, (list, tuple, np.ndarray)):
                object.__setattr__(self, attr, tuple(float(v) for v in value))
            else:
                object.__setattr__(self, attr, float(value))
        lo, hi = np.asarray(self.min_item), np.asarray(self.max_item)
        if lo.shape == hi.shape and not (lo < hi).all():
            raise ValidationError("min_item must be strictly below max_item")

    def item_bounds(self, n_algorithms: int) -> tuple[np.ndarray, np.ndarray]:
        """Per-algorithm (lower, upper) bounds, broadcast and sanity-checked."""
        lo = np.broadcast_to(np.asarray(self.min_item, dtype=float), n_algorithms)
        hi = np.broadcast_to(np.asarray(self.max_item, dtype=float), n_algorithms)
        if lo.shape != (n_algorithms,) or hi.shape != (n_algorithms,):
            raise ValidationError(
                "min_item/max_item must be scalars or one value per algorithm"
            )
        if not (lo < hi).all():
            raise ValidationError("min_item must be strictly below max_item")
        return lo.astype(float), hi.astype(float)

    def to_dict(self) -> dict:
        def plain(v):
            return list(v) if isinstance(v, tuple) else v

        return {
            "scale": self.scale,
            "invert": self.invert,
            "scale_by": self.scale_by,
            "min_item": plain(self.min_item),
            "max_item": plain(self.max_item),
            "clamp_eps": self.clamp_eps,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TransformConfig":
        known = {f for f in ("scale", "invert", "scale_by", "min_item", "max_item", "clamp_eps")}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown transform options: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ScaledMatrix:
    """Proportion-scale performance values plus their clamped version.

    ``values`` lie in [0, 1]; ``clamped`` in [clamp_eps, 1 - clamp_eps] and
    differ from ``values`` only where those fell outside the open band.
    """

    instance_ids: tuple[str, ...]
    algorithm_names: tuple[str, ...]
    values: np.ndarray
    clamped: np.ndarray
    provenance: TransformConfig | None = None

    @property
    def n_instances(self) -> int:
        return self.values.shape[0]

    @property
    def n_algorithms(self) -> int:
        return self.values.shape[1]


def _invert_columns(values: np.ndarray) -> np.ndarray:
    return values.max(axis=0) - values


def _scaling_bounds(
    values: np.ndarray, cfg: TransformConfig, algorithm_names: Sequence[str]
) -> tuple[np.ndarray, np.ndarray]:
    m = values.shape[1]
    if cfg.scale:
        if cfg.scale_by == "column":
            lo, hi = values.min(axis=0), values.max(axis=0)
        else:
            lo = np.full(m, values.min())
            hi = np.full(m, values.max())
        flat = lo == hi
        if flat.any():
            name = algorithm_names[int(np.argmax(flat))]
            raise DegenerateColumnError(
                f"degenerate algorithm column {name!r}: constant values cannot be scaled"
            )
        return lo, hi
    lo, hi = cfg.item_bounds(m)
    below = values < lo
    above = values > hi
    if below.any() or above.any():
        i, j = np.argwhere(below | above)[0]
        raise ValidationError(
            f"value {values[i, j]!r} at data row {i + 1}, column "
            f"{algorithm_names[j]!r} lies outside [{lo[j]}, {hi[j]}]; "
            "enable scaling or widen min_item/max_item"
        )
    return lo, hi


def apply_transforms(
    m: PerformanceMatrix, cfg: TransformConfig | None = None
) -> ScaledMatrix:
    """Map a raw matrix to clamped proportions (invert -> scale -> clamp).

    Raises:
        ValidationError: with ``scale`` off, when any value falls outside the
            item bounds.
        DegenerateColumnError: when a column is constant after the transforms.
    """
    cfg = cfg or TransformConfig()
    values = np.array(m.values, dtype=float)
    if cfg.invert:
        values = _invert_columns(values)
    lo, hi = _scaling_bounds(values, cfg, m.algorithm_names)
    values = (values - lo) / (hi - lo)
    clamped = np.clip(values, cfg.clamp_eps, 1.0 - cfg.clamp_eps)
    spread = clamped.max(axis=0) - clamped.min(axis=0)
    if (spread == 0.0).any():
        name = m.algorithm_names[int(np.argmax(spread == 0.0))]
        raise DegenerateColumnError(
            f"degenerate algorithm column {name!r}: no variance after transforms"
        )
    return ScaledMatrix(m.instance_ids, m.algorithm_names, values, clamped, cfg)


class PerformanceScaler(TransformerMixin, BaseEstimator):
    """Scikit-learn transformer wrapping the invert/scale/clamp mapping.

    ``fit`` learns the column statistics (inversion offsets and scaling
    bounds) from the training matrix; ``transform`` maps any matrix with the
    same columns through them, clipping out-of-range values into [0, 1].
    ``fit_transform`` on one matrix reproduces :func:`apply_transforms`.
    """

    def __init__(
        self,
        scale: bool = True,
        invert: bool = False,
        scale_by: str = "column",
        min_item: float = 0.0,
        max_item: float = 1.0,
        clamp_eps: float = 0.005,
    ):
        self.scale = scale
        self.invert = invert
        self.scale_by = scale_by
        self.min_item = min_item
        self.max_item = max_item
        self.clamp_eps = clamp_eps

    def _config(self) -> TransformConfig:
        return TransformConfig(
            scale=self.scale,
            invert=self.invert,
            scale_by=self.scale_by,
            min_item=self.min_item,
            max_item=self.max_item,
            clamp_eps=self.clamp_eps,
        )

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        cfg = self._config()
        names = tuple(f"col{j}" for j in range(X.shape[1]))
        values = _invert_columns(X) if cfg.invert else X
        self.invert_max_ = X.max(axis=0) if cfg.invert else None
        self.lower_, self.upper_ = _scaling_bounds(values, cfg, names)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "lower_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"expected {self.n_features_in_} columns, got {X.shape[1]}"
            )
        values = (self.invert_max_ - X) if self.invert_max_ is not None else X
        values = (values - self.lower_) / (self.upper_ - self.lower_)
        values = np.clip(values, 0.0, 1.0)
        return np.clip(values, self.clamp_eps, 1.0 - self.clamp_eps)
