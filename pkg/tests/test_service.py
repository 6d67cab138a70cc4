import base64

import pytest
from fastapi.testclient import TestClient

from regenmark.service.app import create_app
from regenmark.zoo import default_config, default_zoo


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def vector_doc(values):
    return {"modality": "vector", "values": values}


def vector_spec(block):
    return {"id": block["id"], "kind": block["kind"], "parameters": block["parameters"]}


ZOO = default_zoo("vector")


class TestOneShotEndpoints:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"

    def test_distance(self, client):
        response = client.post(
            "/distance",
            json={
                "metric": "euclidean",
                "candidate": vector_doc([1.0, 0.0]),
                "reference": vector_doc([0.0, 1.0]),
            },
        )
        assert response.status_code == 200
        assert response.json()["value"] == pytest.approx(2**0.5)

    def test_distance_modality_mismatch_is_400(self, client):
        response = client.post(
            "/distance",
            json={
                "metric": "bleu",
                "candidate": vector_doc([1.0]),
                "reference": vector_doc([1.0]),
            },
        )
        assert response.status_code == 400
        assert "bleu" in response.json()["detail"]

    def test_image_payload_round_trip(self, client):
        pixels = base64.b64encode(bytes(range(16))).decode()
        doc = {"modality": "image", "height": 4, "width": 4, "channels": 1, "pixels_b64": pixels}
        response = client.post(
            "/distance", json={"metric": "mse", "candidate": doc, "reference": doc}
        )
        assert response.status_code == 200
        assert response.json()["value"] == 0.0

    def test_generate_initial_deterministic(self, client):
        request = {"generator": vector_spec(ZOO[0]), "prompt": "storm on sea", "seed": 9}
        a = client.post("/generate-initial", json=request).json()
        b = client.post("/generate-initial", json=request).json()
        assert a == b
        assert len(a["sample"]["values"]) == 16

    def test_regenerate(self, client):
        request = {
            "generator": vector_spec(ZOO[0]),
            "sample": vector_doc([0.0] * 16),
            "seed": 4,
        }
        response = client.post("/regenerate", json=request)
        assert response.status_code == 200
        assert len(response.json()["sample"]["values"]) == 16

    def test_verify_roundtrip(self, client):
        response = client.post(
            "/verify",
            json={
                "sample": vector_doc([1.0] * 16),
                "authentic": vector_spec(ZOO[0]),
                "contrast": vector_spec(ZOO[1]),
                "metric": "euclidean",
                "delta": 0.05,
                "seed": 3,
            },
        )
        assert response.status_code == 200
        body = response.json()
        assert set(body) == {"authentic", "contrast", "d_auth", "d_contrast", "ratio", "delta", "verified"}
        assert body["ratio"] == pytest.approx(body["d_contrast"] / body["d_auth"], rel=1e-9)

    def test_validation_is_422(self, client):
        response = client.post("/distance", json={"metric": "euclidean"})
        assert response.status_code == 422


class TestRealSocketBoot:
    def test_uvicorn_serves_over_tcp(self):
        """The service boots under uvicorn and answers over a real socket."""
        import socket
        import threading
        import time

        import httpx
        import uvicorn

        from regenmark.service.app import create_app

        with socket.create_server(("127.0.0.1", 0)) as probe:
            port = probe.getsockname()[1]
        server = uvicorn.Server(
            uvicorn.Config(create_app(), host="127.0.0.1", port=port, log_level="error")
        )
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        try:
            deadline = time.time() + 10
            while not server.started:
                assert time.time() < deadline, "service did not start"
                time.sleep(0.05)
            with httpx.Client(base_url=f"http://127.0.0.1:{port}") as http:
                assert http.get("/health").json()["status"] == "ok"
                body = http.post(
                    "/distance",
                    json={
                        "metric": "euclidean",
                        "candidate": vector_doc([3.0, 0.0]),
                        "reference": vector_doc([0.0, 4.0]),
                    },
                ).json()
                assert body["value"] == pytest.approx(5.0)
        finally:
            server.should_exit = True
            thread.join(timeout=5)


class TestExperimentEndpoints:
    def test_generate_then_verify(self, client, tmp_path):
        config = default_config("vector", output_dir=str(tmp_path / "run"), size=2, iterations=1)
        config["attacks"] = []
        response = client.post("/experiments/generate", json={"config": config, "jobs": 1})
        assert response.status_code == 200
        manifest = response.json()["manifest"]
        assert manifest["command"] == "generate"
        assert (tmp_path / "run" / "distances.csv").exists()

        response = client.post("/experiments/verify", json={"config": config, "jobs": 1})
        assert response.status_code == 200
        assert (tmp_path / "run" / "verification" / "pairs.csv").exists()

    def test_verify_without_traces_is_409(self, client, tmp_path):
        config = default_config("vector", output_dir=str(tmp_path / "empty"), size=2, iterations=1)
        config["attacks"] = []
        response = client.post("/experiments/verify", json={"config": config, "jobs": 1})
        assert response.status_code == 409

    def test_bad_config_is_422(self, client, tmp_path):
        config = default_config("vector", output_dir=str(tmp_path / "x"), size=2, iterations=1)
        config["deltas"] = [-1.0]
        response = client.post("/experiments/generate", json={"config": config})
        assert response.status_code == 422
        detail = response.json()["detail"]
        assert any("deltas" in str(err.get("loc", [])) for err in detail)
