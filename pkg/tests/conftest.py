import socket
from pathlib import Path

import pytest

from mvlogic.parser import parse_scenario_file

SCENARIOS = Path(__file__).resolve().parents[1] / "src" / "mvlogic" / "scenarios"


@pytest.fixture(autouse=True)
def no_network(monkeypatch):
    """The whole suite must run offline; any socket connect is a failure."""

    def guard(self, *args, **kwargs):
        raise RuntimeError("test attempted to open a network connection")

    monkeypatch.setattr(socket.socket, "connect", guard)


@pytest.fixture
def scenario_path():
    def lookup(name: str) -> Path:
        path = SCENARIOS / name
        assert path.exists(), f"missing corpus file {name}"
        return path

    return lookup


@pytest.fixture
def load_scenario(scenario_path):
    def load(name: str):
        return parse_scenario_file(scenario_path(name))

    return load
