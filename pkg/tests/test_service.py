import math
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from taunav.service.app import STABILITY_CSV_COLUMNS, create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def episode_payload(**kw):
    config = {
        "world": "fixture:straight_corridor",
        "initial": {"x": 0.3, "y": 0.5, "theta": math.pi / 2, "v": 1.0},
        "roi": {"tau_max": 12.0},
        "duration": 3.0,
        "seed": 1,
    }
    config.update(kw)
    return {"config": config}


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"


def test_simulate_roundtrip(client):
    reply = client.post("/simulate", json=episode_payload())
    assert reply.status_code == 200
    body = reply.json()
    header = body["csv"].splitlines()[0]
    assert header.startswith("t,x,y,theta,v,u,phase,mode")
    assert body["collision"] is False
    assert body["metrics"]["duration"] == pytest.approx(3.0)


def test_simulate_validates_config(client):
    bad = episode_payload(gains={"k_f": -1.0})
    reply = client.post("/simulate", json=bad)
    assert reply.status_code == 422
    detail = str(reply.json()["detail"])
    assert "k_f" in detail


def test_simulate_bad_world(client):
    reply = client.post("/simulate", json=episode_payload(world="/nope/missing.json"))
    assert reply.status_code == 400
    assert "missing.json" in reply.json()["detail"]


def test_simulate_reports_collision(client):
    payload = episode_payload(world="fixture:l_corridor", controller="fixed",
                              fixed_u=0.0, duration=20.0)
    body = client.post("/simulate", json=payload).json()
    assert body["collision"] is True
    assert body["events"][-1]["type"] == "collision"


def test_stability_endpoint(client):
    reply = client.post("/stability", json={
        "single_wall": {"k": [1.0, 0.5], "f": [1.0], "c": [3.0, 2.0]},
    })
    body = reply.json()
    assert len(body["rows"]) == 4
    assert body["csv"].splitlines()[0] == ",".join(STABILITY_CSV_COLUMNS)
    by_key = {(r["k"], r["c"]): r for r in body["rows"]}
    assert by_key[(1.0, 3.0)]["re1"] == pytest.approx(-2.618033988749895)
    # k = 0.5, c = 2: k f c^2 = 2 < 4 -> complex pair
    assert by_key[(0.5, 2.0)]["im1"] != 0.0
    assert by_key[(0.5, 2.0)]["real_eigs"] is False


def test_stability_empty_grid(client):
    assert client.post("/stability", json={}).status_code == 400


def test_tau_trace_endpoint(client):
    reply = client.post("/tau-trace", json={"config": {"duration": 1.5}})
    body = reply.json()
    assert len(body["summary"]["series"]) == 6
    assert body["csv"].splitlines()[0] == "t,tau_geom,tau_per,phase,variant,maneuver"


def test_sweep_endpoint(client):
    payload = {
        "config": episode_payload(duration=2.0)["config"],
        "grid": {"k_f": [0.6, 1.0], "k_m": [0.02, 0.05]},
        "seeds": [0, 1, 2],
    }
    body = client.post("/sweep", json=payload).json()
    assert len(body["rows"]) == 12
    assert body["n_ok"] == 12
    header = body["csv"].splitlines()[0].split(",")
    assert header[:2] == ["k_f", "k_m"]
    assert "progress" in header


def test_sweep_empty_grid(client):
    payload = {"config": episode_payload()["config"], "grid": {}, "seeds": [0]}
    assert client.post("/sweep", json=payload).status_code == 400
