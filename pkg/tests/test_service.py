import math
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from sq3.service import create_app
from sq3.service.models import DiameterResponse, TableResponse


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    assert client.get("/health").json()["status"] == "ok"


def test_diameter_exact(client):
    r = client.post("/diameter", json={"spec": "duval:22"})
    assert r.status_code == 200
    d = DiameterResponse.model_validate(r.json())
    assert d.order == 96 and d.orbit_size == 8 and d.vertices == 8
    assert d.bound.exact and d.bound.cos2 == "1/4"
    assert d.bound.radians == pytest.approx(math.pi / 3)
    assert d.face_sides == {4: 6}


def test_diameter_float_fallback_warns(client):
    r = client.post("/diameter", json={"spec": "duval:10(m=3,n=3)"})
    assert r.status_code == 200
    body = r.json()
    assert body["backend"] == "float"
    assert any("float fallback" in w for w in body["warnings"])


def test_parse_error_has_position(client):
    r = client.post("/diameter", json={"spec": "duval:10(m=3"})
    assert r.status_code == 400
    assert r.json()["error"] == "parse"
    assert r.json()["position"] == 12


def test_invalid_parameters(client):
    r = client.post("/diameter", json={"spec": "duval:33(n=2,r=5,s=2,h=0)", "backend": "float"})
    assert r.status_code == 400
    assert "[1]" in r.json()["detail"]


def test_bad_backend_and_table(client):
    assert client.post("/diameter", json={"spec": "duval:22", "backend": "bogus"}).status_code == 422
    assert client.get("/table/bogus").status_code == 404


def test_orbit_layers(client):
    d = client.post("/orbit", json={"spec": "duval:22"}).json()
    assert [len(layer) for layer in d["layers"]] == [1, 6, 1]
    assert d["layer_cosines"] == [1.0, 0.0, -1.0]


def test_cell_endpoint(client):
    d = client.post("/cell", json={"spec": "duval:20"}).json()
    assert len(d["cell"]["vertices"]) == 6
    assert d["cell"]["statistics"]["face_sides"] == {"3": 8}


def test_validate_endpoint(client):
    d = client.post("/validate", json={"spec": "duval:26''"}).json()
    assert d["valid"]
    assert all(c["ok"] for c in d["checks"])


def test_table_endpoint(client):
    r = client.get("/table/nonfib-irrational", params={"backend": "float"})
    t = TableResponse.model_validate(r.json())
    assert t.mismatches == 0
    assert len(t.rows) == 13


def test_hypercube_endpoint(client):
    d = client.get("/hypercube/3").json()
    assert d["status"] == "match" and d["exact"]
    assert d["computed_radians"] == pytest.approx(math.pi / 3)


def test_deterministic(client):
    a = client.post("/cell", json={"spec": "duval:32"}).json()
    b = client.post("/cell", json={"spec": "duval:32"}).json()
    assert a == b
