import pytest

from greenroute.netmodel import Link, Topology
from greenroute.traffic import Flow, TrafficSnapshot


def full_triangle(capacity=10.0):
    nodes = ("A", "B", "C")
    links = [Link(a, b, capacity) for a in nodes for b in nodes if a != b]
    return Topology(nodes, tuple(links))


@pytest.fixture
def triangle():
    return full_triangle()


@pytest.fixture
def line():
    return Topology(("A", "B", "C"), (Link("A", "B", 10.0), Link("B", "C", 10.0)))


def snapshot(*flows, timestamp="t0"):
    return TrafficSnapshot(timestamp, tuple(Flow(s, d, r) for s, d, r in flows))


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return _write
