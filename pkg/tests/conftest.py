import pytest
from pathlib import Path

from feedlab.model import Manifest
from feedlab.service import Hub, RoomConfig
from feedlab.simulate import FakeClock

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"
TEST_FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def manifest():
    return Manifest.load(FIXTURES / "manifest_sample.json")


@pytest.fixture
def clock():
    return FakeClock()


@pytest.fixture
def hub(tmp_path, clock):
    h = Hub(data_dir=tmp_path / "data", clock=clock, rng_seed=1234)
    yield h
    h.close()


@pytest.fixture
def feed_room(hub, manifest):
    return hub.create_room(RoomConfig(manifest=manifest))
