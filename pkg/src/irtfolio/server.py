"""HTTP API exposing the analysis pipeline.

Datasets are content-addressed (id = SHA-256 of the CSV bytes) and kept on
disk together with computed analysis payloads, so a restarted server finds
its cache again. Computation per cache key is serialized by a lock so that
simultaneous identical requests collapse into one fit. Epsilon never enters
the cache key: partitions are re-derived from the cached spline grid per
request.
"""

from __future__ import annotations

import hashlib
import json
import tempfile
import threading
import time
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import datasets
from .bundle import (
    compute_cache_key,
    payload_json_bytes,
    run_analysis,
    with_epsilon,
)
from .errors import AnalysisError, ValidationError
from .performance import TransformConfig, parse_csv

MAX_UPLOAD_BYTES = 20 * 2**20


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status, detail={"code": code, "message": message})


@dataclass
class DatasetRecord:
    id: str
    name: str
    source: str
    n_instances: int
    n_algorithms: int
    uploaded_at: float
    raw: bytes


class TransformOptions(BaseModel):
    scale: bool = True
    invert: bool = False
    scale_by: str = "column"
    min_item: float | list[float] = 0.0
    max_item: float | list[float] = 1.0
    clamp_eps: float = 0.005

    def to_config(self) -> TransformConfig:
        return TransformConfig(
            scale=self.scale,
            invert=self.invert,
            scale_by=self.scale_by,
            min_item=tuple(self.min_item) if isinstance(self.min_item, list) else self.min_item,
            max_item=tuple(self.max_item) if isinstance(self.max_item, list) else self.max_item,
            clamp_eps=self.clamp_eps,
        )


class AnalysisRequest(BaseModel):
    transform: TransformOptions = TransformOptions()
    epsilon: float = 0.0


class AnalysisStore:
    """Disk-backed dataset and analysis cache."""

    def __init__(self, root: Path):
        self.root = root
        self.datasets_dir = root / "datasets"
        self.bundles_dir = root / "bundles"
        self.datasets_dir.mkdir(parents=True, exist_ok=True)
        self.bundles_dir.mkdir(parents=True, exist_ok=True)
        self._datasets: dict[str, DatasetRecord] = {}
        self._bundles: dict[str, dict] = {}
        self._latest: dict[str, str] = {}
        self._tars: dict[str, bytes] = {}
        self._mutex = threading.Lock()
        self._compute_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._load_existing()

    def _load_existing(self) -> None:
        for meta_file in sorted(self.datasets_dir.glob("*.meta.json")):
            meta = json.loads(meta_file.read_text())
            raw = (self.datasets_dir / f"{meta['id']}.csv").read_bytes()
            self._datasets[meta["id"]] = DatasetRecord(raw=raw, **meta)
        for bundle_file in sorted(self.bundles_dir.glob("*.json")):
            entry = json.loads(bundle_file.read_text())
            key = entry["cache_key"]
            self._bundles[key] = entry
            dataset_id = entry["dataset_id"]
            current = self._latest.get(dataset_id)
            if current is None or entry["created_at"] >= self._bundles[current]["created_at"]:
                self._latest[dataset_id] = key

    def add_dataset(self, raw: bytes, name: str, source: str = "upload") -> DatasetRecord:
        """Validate and store a CSV; identical content reuses the record."""
        dataset_id = hashlib.sha256(raw).hexdigest()
        with self._mutex:
            existing = self._datasets.get(dataset_id)
            if existing is not None:
                return existing
        matrix = parse_csv(raw)
        record = DatasetRecord(
            id=dataset_id,
            name=name,
            source=source,
            n_instances=matrix.n_instances,
            n_algorithms=matrix.n_algorithms,
            uploaded_at=time.time(),
            raw=raw,
        )
        with self._mutex:
            if dataset_id not in self._datasets:
                csv_path = self.datasets_dir / f"{dataset_id}.csv"
                tmp = csv_path.with_suffix(".tmp")
                tmp.write_bytes(raw)
                tmp.replace(csv_path)
                meta = {
                    "id": record.id,
                    "name": record.name,
                    "source": record.source,
                    "n_instances": record.n_instances,
                    "n_algorithms": record.n_algorithms,
                    "uploaded_at": record.uploaded_at,
                }
                (self.datasets_dir / f"{dataset_id}.meta.json").write_text(
                    json.dumps(meta)
                )
                self._datasets[dataset_id] = record
            return self._datasets[dataset_id]

    def get_dataset(self, dataset_id: str) -> DatasetRecord:
        record = self._datasets.get(dataset_id)
        if record is None:
            raise _error(404, "unknown_dataset", f"no dataset with id {dataset_id!r}")
        return record

    def list_datasets(self) -> list[dict]:
        records = sorted(self._datasets.values(), key=lambda r: (r.source, r.name, r.id))
        return [
            {
                "id": r.id,
                "name": r.name,
                "source": r.source,
                "n_instances": r.n_instances,
                "n_algorithms": r.n_algorithms,
                "uploaded_at": r.uploaded_at,
            }
            for r in records
        ]

    def compute(self, dataset_id: str, config: TransformConfig, epsilon: float) -> tuple[dict, bool]:
        """Return (cache entry, cache_hit) for a dataset + transform config."""
        record = self.get_dataset(dataset_id)
        key = compute_cache_key(dataset_id, config)
        with self._mutex:
            lock = self._compute_locks[key]
        with lock:
            entry = self._bundles.get(key)
            if entry is not None:
                self._latest[dataset_id] = key
                return entry, True
            matrix = parse_csv(record.raw)
            bundle = run_analysis(
                matrix,
                config,
                epsilon,
                source_name=record.name,
                dataset_digest=dataset_id,
            )
            entry = {
                "cache_key": key,
                "dataset_id": dataset_id,
                "created_at": time.time(),
                "converged": bundle.params.converged,
                "payload": bundle.to_payload(),
            }
            with self._mutex:
                self._bundles[key] = entry
                self._latest[dataset_id] = key
            tmp = self.bundles_dir / f"{key}.tmp"
            tmp.write_text(json.dumps(entry))
            tmp.replace(self.bundles_dir / f"{key}.json")
            return entry, False

    def latest_entry(self, dataset_id: str) -> dict:
        self.get_dataset(dataset_id)
        key = self._latest.get(dataset_id)
        if key is None:
            raise _error(
                404, "analysis_not_computed",
                f"no analysis computed for dataset {dataset_id!r} yet",
            )
        return self._bundles[key]

    def bundle_tar(self, dataset_id: str) -> bytes:
        from .export import build_bundle_tar

        entry = self.latest_entry(dataset_id)
        tar_key = f"{entry['cache_key']}@{entry['payload']['epsilon']}"
        with self._mutex:
            cached = self._tars.get(tar_key)
        if cached is not None:
            return cached
        data = build_bundle_tar(entry["payload"])
        with self._mutex:
            self._tars.setdefault(tar_key, data)
            return self._tars[tar_key]


def _check_epsilon(epsilon: float) -> float:
    if not 0.0 <= epsilon <= 1.0:
        raise _error(400, "epsilon_out_of_range", f"epsilon must lie in [0, 1], got {epsilon}")
    return float(epsilon)


def create_app(
    data_dir: Path | str | None = None,
    *,
    max_upload_bytes: int = MAX_UPLOAD_BYTES,
    preload_examples: bool = True,
) -> FastAPI:
    """Build the API app, optionally preloading the bundled examples."""
    root = Path(data_dir) if data_dir else Path(tempfile.mkdtemp(prefix="irtfolio-"))
    store = AnalysisStore(root)
    if preload_examples:
        for name in datasets.example_names():
            store.add_dataset(datasets.example_csv_bytes(name), name, source="example")

    app = FastAPI(title="irtfolio", version="0.1.0")
    app.state.store = store
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/datasets")
    def list_datasets():
        return {"datasets": store.list_datasets()}

    @app.post("/datasets", status_code=201)
    async def upload_dataset(request: Request, name: str | None = None):
        raw = await request.body()
        if not raw:
            raise _error(422, "validation_error", "empty request body")
        if len(raw) > max_upload_bytes:
            raise _error(
                413, "payload_too_large",
                f"dataset exceeds the {max_upload_bytes} byte limit",
            )
        dataset_name = name or f"upload-{hashlib.sha256(raw).hexdigest()[:8]}"
        try:
            record = store.add_dataset(raw, dataset_name)
        except ValidationError as exc:
            raise _error(422, "validation_error", str(exc)) from None
        return {
            "id": record.id,
            "name": record.name,
            "n_instances": record.n_instances,
            "n_algorithms": record.n_algorithms,
        }

    @app.post("/datasets/{dataset_id}/analysis")
    def compute_analysis(dataset_id: str, request: AnalysisRequest):
        epsilon = _check_epsilon(request.epsilon)
        try:
            config = request.transform.to_config()
        except ValidationError as exc:
            raise _error(422, "validation_error", str(exc)) from None
        try:
            entry, cache_hit = store.compute(dataset_id, config, epsilon)
        except AnalysisError as exc:
            raise _error(422, "analysis_failed", str(exc)) from None
        return {
            "dataset_id": dataset_id,
            "cache_key": entry["cache_key"],
            "cache_hit": cache_hit,
            "fit_created_at": entry["created_at"],
            "converged": entry["converged"],
            "epsilon": epsilon,
        }

    @app.get("/datasets/{dataset_id}/analysis")
    def get_analysis(dataset_id: str, epsilon: float | None = Query(default=None)):
        entry = store.latest_entry(dataset_id)
        payload = entry["payload"]
        if epsilon is not None:
            payload = with_epsilon(payload, _check_epsilon(epsilon))
        return Response(
            content=json.dumps(
                {
                    "fit_created_at": entry["created_at"],
                    "cache_key": entry["cache_key"],
                    **payload,
                },
                sort_keys=True,
            ),
            media_type="application/json",
        )

    @app.get("/datasets/{dataset_id}/plots/{plot_name}")
    def get_plot(dataset_id: str, plot_name: str, epsilon: float | None = Query(default=None)):
        from .plots import plot_kinds, render_plot

        if not plot_name.endswith(".svg"):
            raise _error(404, "unknown_plot", f"unknown plot {plot_name!r}")
        kind = plot_name[: -len(".svg")]
        entry = store.latest_entry(dataset_id)
        payload = entry["payload"]
        if kind not in plot_kinds(payload):
            raise _error(404, "unknown_plot", f"unknown plot {plot_name!r}")
        if epsilon is not None:
            payload = with_epsilon(payload, _check_epsilon(epsilon))
        return Response(content=render_plot(payload, kind, fmt="svg"), media_type="image/svg+xml")

    @app.get("/datasets/{dataset_id}/bundle.tar")
    def get_bundle(dataset_id: str):
        data = store.bundle_tar(dataset_id)
        return Response(
            content=data,
            media_type="application/x-tar",
            headers={"Content-Disposition": 'attachment; filename="bundle.tar"'},
        )

    return app
