"""
Tests for the control API endpoints.
"""
import pytest
from fastapi.testclient import TestClient

from conftest import make_sample
from src import __version__
from src.api.app import create_app
from src.detector.mlp import init_model
from src.xapp.service import DetectionService


@pytest.fixture
def service(registry):
    registry.register(init_model(seed=1))
    registry.register(init_model(seed=2))
    return DetectionService(registry)


@pytest.fixture
def client(service):
    return TestClient(create_app(service))


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["endpoints"]["model_update"] == "/a1/model-update"


def test_health_before_deploy(client):
    data = client.get("/health").json()
    assert data["status"] == "healthy"
    assert data["version"] == __version__
    assert data["model_deployed"] is False


def test_status_counts(client, service):
    service.handle_model_update(1, "registry://v1")
    for i in range(20):
        service.ingest(make_sample(i * 100))
    data = client.get("/a1/status").json()
    assert data == {
        "model_version": 1, "received": 20, "inferred": 6, "dropped": 0,
        "gaps": 0, "decode_errors": 0, "swaps": 1,
    }


def test_model_update_ack(client, service):
    response = client.post("/a1/model-update", json={"model_version": 2, "registry_uri": "registry://v2"})
    assert response.status_code == 200
    assert response.json() == {"ack": True, "old": None, "new": 2, "error": None}
    assert service.model_version == 2
    assert client.get("/health").json()["model_deployed"] is True


def test_duplicate_model_update(client):
    body = {"model_version": 1, "registry_uri": "registry://v1"}
    client.post("/a1/model-update", json=body)
    response = client.post("/a1/model-update", json=body)
    assert response.status_code == 200
    assert response.json()["old"] == response.json()["new"] == 1


def test_unknown_version_is_404(client, service):
    response = client.post("/a1/model-update", json={"model_version": 7, "registry_uri": "registry://v7"})
    assert response.status_code == 404
    assert response.json()["ack"] is False
    assert service.model_version is None


@pytest.mark.parametrize("uri", ["registry://v1", "s3://bucket/v2"])
def test_bad_uri_is_422(client, uri):
    response = client.post("/a1/model-update", json={"model_version": 2, "registry_uri": uri})
    assert response.status_code == 422
    assert response.json()["ack"] is False


def test_invalid_request_body(client):
    response = client.post("/a1/model-update", json={"model_version": 0, "registry_uri": "registry://v0"})
    assert response.status_code == 422


def test_not_ready_without_service():
    client = TestClient(create_app())
    assert client.get("/a1/status").status_code == 503
    assert client.get("/health").json()["status"] == "Initializing"
    response = client.post("/a1/model-update", json={"model_version": 1, "registry_uri": "registry://v1"})
    assert response.status_code == 503
