import io
import json
import tarfile
import threading

import pytest
from fastapi.testclient import TestClient

from irtfolio.datasets import example_csv_bytes
from irtfolio.server import create_app

VALID_CSV = b"fast,slow,steady\n" + b"\n".join(
    f"{0.3 + 0.05 * (i % 9):.3f},{0.9 - 0.04 * (i % 11):.3f},{0.5 + 0.02 * (i % 7):.3f}".encode()
    for i in range(24)
) + b"\n"


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    app = create_app(data_dir=tmp_path_factory.mktemp("server-data"))
    with TestClient(app) as c:
        yield c


@pytest.fixture(scope="module")
def uploaded_id(client):
    response = client.post("/datasets", content=VALID_CSV)
    assert response.status_code == 201
    return response.json()["id"]


class TestHealthAndListing:
    def test_health(self, client):
        assert client.get("/health").json() == {"status": "ok"}

    def test_examples_preloaded(self, client):
        names = {d["name"] for d in client.get("/datasets").json()["datasets"]}
        assert {"classification-demo", "anomalous-demo", "raw-accuracy-demo"} <= names

    def test_listing_contains_dimensions(self, client):
        listing = client.get("/datasets").json()["datasets"]
        demo = next(d for d in listing if d["name"] == "classification-demo")
        assert demo["n_instances"] == 200
        assert demo["n_algorithms"] == 8
        assert demo["source"] == "example"


class TestUpload:
    def test_valid_upload(self, client):
        response = client.post("/datasets", content=VALID_CSV)
        assert response.status_code == 201
        body = response.json()
        assert body["n_instances"] == 24
        assert body["n_algorithms"] == 3

    def test_duplicate_upload_returns_same_id(self, client):
        a = client.post("/datasets", content=VALID_CSV).json()["id"]
        b = client.post("/datasets", content=VALID_CSV).json()["id"]
        assert a == b

    def test_invalid_cell_names_row_and_column(self, client):
        bad = b"x,y\n0.1,0.2\n0.3,whoops\n"
        response = client.post("/datasets", content=bad)
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert detail["code"] == "validation_error"
        assert "data row 2" in detail["message"]
        assert "'y'" in detail["message"]

    def test_empty_body(self, client):
        assert client.post("/datasets", content=b"").status_code == 422

    def test_oversize_body(self, tmp_path):
        app = create_app(data_dir=tmp_path, max_upload_bytes=100, preload_examples=False)
        with TestClient(app) as small_client:
            response = small_client.post("/datasets", content=b"a,b\n" + b"1,2\n" * 200)
            assert response.status_code == 413


class TestCompute:
    def test_compute_then_cache_hit(self, client, uploaded_id):
        first = client.post(f"/datasets/{uploaded_id}/analysis", json={})
        assert first.status_code == 200
        assert first.json()["cache_hit"] is False
        second = client.post(f"/datasets/{uploaded_id}/analysis", json={})
        assert second.json()["cache_hit"] is True
        assert second.json()["fit_created_at"] == first.json()["fit_created_at"]
        assert second.json()["cache_key"] == first.json()["cache_key"]

    def test_epsilon_change_reuses_fit(self, client, uploaded_id):
        base = client.post(f"/datasets/{uploaded_id}/analysis", json={"epsilon": 0.0})
        other = client.post(f"/datasets/{uploaded_id}/analysis", json={"epsilon": 0.1})
        assert other.json()["cache_hit"] is True
        assert other.json()["fit_created_at"] == base.json()["fit_created_at"]
        a = client.get(f"/datasets/{uploaded_id}/analysis", params={"epsilon": 0.0}).json()
        b = client.get(f"/datasets/{uploaded_id}/analysis", params={"epsilon": 0.1}).json()
        assert a["fit_created_at"] == b["fit_created_at"]
        assert a["partition"] != b["partition"]

    def test_transform_change_recomputes(self, client, uploaded_id):
        inverted = client.post(
            f"/datasets/{uploaded_id}/analysis", json={"transform": {"invert": True}}
        )
        assert inverted.json()["cache_hit"] is False

    def test_unknown_dataset_404(self, client):
        response = client.post("/datasets/deadbeef/analysis", json={})
        assert response.status_code == 404

    def test_epsilon_out_of_range_400(self, client, uploaded_id):
        response = client.post(f"/datasets/{uploaded_id}/analysis", json={"epsilon": 2})
        assert response.status_code == 400
        assert response.json()["detail"]["code"] == "epsilon_out_of_range"

    def test_degenerate_data_422(self, client):
        constant = b"a,b\n" + b"0.5,0.1\n0.5,0.9\n" * 3
        dataset_id = client.post("/datasets", content=constant).json()["id"]
        response = client.post(f"/datasets/{dataset_id}/analysis", json={})
        assert response.status_code == 422
        assert "degenerate" in response.json()["detail"]["message"]

    def test_concurrent_computes_collapse(self, client):
        csv = example_csv_bytes("raw-accuracy-demo")
        dataset_id = client.post("/datasets", content=csv).json()["id"]
        results = []

        def compute():
            results.append(client.post(f"/datasets/{dataset_id}/analysis", json={}).json())

        threads = [threading.Thread(target=compute) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        stamps = {r["fit_created_at"] for r in results}
        assert len(stamps) == 1
        assert sum(not r["cache_hit"] for r in results) == 1


class TestGetAnalysis:
    def test_payload_contract(self, client, uploaded_id):
        client.post(f"/datasets/{uploaded_id}/analysis", json={})
        payload = client.get(f"/datasets/{uploaded_id}/analysis").json()
        for name in payload["dataset"]["algorithms"]:
            assert len(payload["splines"]["fitted"][name]) == 101
            assert len(payload["splines"]["se"][name]) == 101
        counts = [round(r["strength_proportion"] * 101) for r in payload["occupancy"]]
        assert sum(counts) >= 101
        assert "fit_created_at" in payload

    def test_not_computed_404(self, client):
        csv = b"u,v\n0.1,0.9\n0.4,0.6\n0.2,0.8\n0.3,0.7\n0.15,0.85\n0.35,0.65\n"
        dataset_id = client.post("/datasets", content=csv).json()["id"]
        response = client.get(f"/datasets/{dataset_id}/analysis")
        assert response.status_code == 404
        assert response.json()["detail"]["code"] == "analysis_not_computed"

    def test_anomalous_demo_flags_one_algorithm(self, client):
        listing = client.get("/datasets").json()["datasets"]
        demo_id = next(d["id"] for d in listing if d["name"] == "anomalous-demo")
        client.post(f"/datasets/{demo_id}/analysis", json={})
        payload = client.get(f"/datasets/{demo_id}/analysis").json()
        flagged = [n for n, a in payload["attributes"].items() if a["anomalous"]]
        assert flagged == ["solver_c"]


class TestPlots:
    def test_svg_plots_served(self, client, uploaded_id):
        client.post(f"/datasets/{uploaded_id}/analysis", json={})
        for name in ("1", "2", "3", "4", "goodness", "effectiveness1",
                     "effectiveness2", "effectiveness3", "heatmap-fast"):
            response = client.get(f"/datasets/{uploaded_id}/plots/{name}.svg")
            assert response.status_code == 200, name
            assert response.headers["content-type"].startswith("image/svg")

    def test_unknown_plot_404(self, client, uploaded_id):
        assert client.get(f"/datasets/{uploaded_id}/plots/nope.svg").status_code == 404

    def test_plot4_epsilon_parameter(self, client, uploaded_id):
        a = client.get(f"/datasets/{uploaded_id}/plots/4.svg", params={"epsilon": 0.0})
        b = client.get(f"/datasets/{uploaded_id}/plots/4.svg", params={"epsilon": 0.1})
        assert a.status_code == b.status_code == 200


class TestBundle:
    def test_bundle_round_trip(self, client, uploaded_id):
        client.post(f"/datasets/{uploaded_id}/analysis", json={})
        response = client.get(f"/datasets/{uploaded_id}/bundle.tar")
        assert response.status_code == 200
        assert response.headers["content-type"] == "application/x-tar"
        with tarfile.open(fileobj=io.BytesIO(response.content)) as tar:
            names = tar.getnames()
        for required in ("plot1.png", "plot2.png", "plot3.png", "plot4.png",
                         "analysis.json"):
            assert required in names

    def test_bundle_bytes_identical_across_requests(self, client, uploaded_id):
        client.post(f"/datasets/{uploaded_id}/analysis", json={})
        a = client.get(f"/datasets/{uploaded_id}/bundle.tar").content
        b = client.get(f"/datasets/{uploaded_id}/bundle.tar").content
        assert a == b

    def test_bundle_before_compute_404(self, client):
        csv = b"m,n\n0.2,0.8\n0.3,0.7\n0.4,0.6\n0.25,0.75\n0.35,0.65\n0.15,0.85\n"
        dataset_id = client.post("/datasets", content=csv).json()["id"]
        assert client.get(f"/datasets/{dataset_id}/bundle.tar").status_code == 404


class TestPersistence:
    def test_restart_finds_datasets_and_cache(self, tmp_path):
        app = create_app(data_dir=tmp_path, preload_examples=False)
        with TestClient(app) as c:
            dataset_id = c.post("/datasets", content=VALID_CSV).json()["id"]
            first = c.post(f"/datasets/{dataset_id}/analysis", json={}).json()
        app2 = create_app(data_dir=tmp_path, preload_examples=False)
        with TestClient(app2) as c2:
            listing = c2.get("/datasets").json()["datasets"]
            assert [d["id"] for d in listing] == [dataset_id]
            again = c2.post(f"/datasets/{dataset_id}/analysis", json={}).json()
            assert again["cache_hit"] is True
            assert again["fit_created_at"] == first["fit_created_at"]
            payload = c2.get(f"/datasets/{dataset_id}/analysis").json()
            assert payload["dataset"]["n_instances"] == 24
