from fastapi.testclient import TestClient

from app.main import app

client = TestClient(app)


def test_healthcheck_ok():
    response = client.get("/health/")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_openapi_lists_the_routers():
    paths = client.get("/openapi.json").json()["paths"]
    assert {"/spec/check", "/backend/health", "/episodes/run", "/prompt/compile"} <= set(paths)
