"""Websocket transport smoke tests using the in-process ASGI test client."""

import json

import pytest

fastapi = pytest.importorskip("fastapi")
from fastapi.testclient import TestClient  # noqa: E402

from feedlab.server import build_app  # noqa: E402
from feedlab.service import Hub, RoomConfig  # noqa: E402


@pytest.fixture
def client(manifest, tmp_path):
    hub = Hub(data_dir=tmp_path, rng_seed=2)
    hub.create_room(RoomConfig(manifest=manifest), code="WSROOM")
    with TestClient(build_app(hub)) as test_client:
        yield test_client


def test_health_lists_rooms(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["rooms"] == ["WSROOM"]


def test_websocket_join_and_act(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps(
            {"type": "hello", "room": "WSROOM", "role": "student", "nickname": "fox"}
        ))
        welcome = json.loads(ws.receive_text())
        assert welcome["type"] == "welcome"
        assert welcome["user"] == "fox"
        feed = json.loads(ws.receive_text())
        assert feed["type"] == "feed" and len(feed["images"]) == 5

        ws.send_text(json.dumps(
            {"type": "action", "action": {"kind": "like", "image": feed["images"][0]}}
        ))
        ack = json.loads(ws.receive_text())
        assert ack == {"type": "ack", "seq": 1}

        # the background ticker pushes the snapshot batch without polling
        types = set()
        while {"log_tail", "profile", "queue"} - types:
            types.add(json.loads(ws.receive_text())["type"])


def test_websocket_malformed_gets_error_frame(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{nope")
        reply = json.loads(ws.receive_text())
        assert reply["type"] == "error"
        assert reply["code"] == "parse"
