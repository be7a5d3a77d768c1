import pytest

from greenroute import bundled_topology
from greenroute.netmodel import (
    Link,
    Topology,
    TopologyError,
    active_subgraph,
    format_topology,
    load_topology,
    parse_topology,
    ring_topology,
)

SNDLIB = """?SNDlib native format; type: network; version: 1.0
# network tiny

NODES (
  N1 ( 1.0 2.0 )
  N2 ( 3.0 4.0 )
  N3 ( 5.0 6.0 )
)

LINKS (
  L1 ( N1 N2 ) 40.00 0.00 0.00 0.00 ( )
  L2 ( N2 N3 ) 0.00 0.00 0.00 0.00 ( 155.00 1.00 622.00 2.00 )
)

DEMANDS (
  D1 ( N1 N3 ) 1 12.5 UNLIMITED
)
"""


def test_three_node_file(write):
    p = write("t.txt", "node A\nnode B\nnode C\nlink A B 10\nlink B A 10  # back\n")
    t = load_topology(p)
    assert t.nodes == ("A", "B", "C")
    assert [(l.src, l.dst, l.capacity, l.active) for l in t.links] == [
        ("A", "B", 10.0, True), ("B", "A", 10.0, True)]
    assert t.node_index == {"A": 0, "B": 1, "C": 2}


def test_node_order_is_file_order(write):
    t = load_topology(write("t.txt", "node z\nnode a\nnode m\n"))
    assert t.nodes == ("z", "a", "m")


def test_undirected_edge_expands(write):
    t = load_topology(write("t.txt", "node A\nnode B\nedge A B 7.5\n"))
    assert {(l.src, l.dst) for l in t.links} == {("A", "B"), ("B", "A")}
    assert all(l.capacity == 7.5 for l in t.links)


@pytest.mark.parametrize("text, fragment, line", [
    ("node X\nlink X X 1\n", "self-loop", 2),
    ("node A\nnode B\nlink A B 1\nlink A B 2\n", "duplicate link", 4),
    ("node A\nlink A Q 1\n", "unknown endpoint", 2),
    ("node A\nnode B\nlink A B 0\n", "non-positive capacity", 3),
    ("node A\nnode B\nlink A B -3\n", "non-positive capacity", 3),
    ("node A\nnode B\nlink A B ten\n", "bad capacity", 3),
    ("node A\nnode A\n", "duplicate node", 2),
    ("node A\nfoo bar\n", "unknown directive", 2),
])
def test_load_errors_carry_line_numbers(write, text, fragment, line):
    with pytest.raises(TopologyError, match=fragment) as info:
        load_topology(write("bad.txt", text))
    assert info.value.line == line


def test_abilene_dimensions():
    t = bundled_topology("abilene")
    assert t.n_nodes == 12
    assert t.n_links == 30


def test_sndlib_import():
    t = parse_topology(SNDLIB)
    assert t.nodes == ("N1", "N2", "N3")
    assert t.n_links == 4
    assert t.link("N1", "N2").capacity == 40.0
    # zero pre-installed capacity falls back to the first module
    assert t.link("N3", "N2").capacity == 155.0


def test_load_is_deterministic(write):
    p = write("t.txt", format_topology(ring_topology(7, chords=3)))
    assert load_topology(p) == load_topology(p)
    assert load_topology(p).nodes == load_topology(p).nodes


def test_topology_invariants_in_constructor():
    with pytest.raises(TopologyError):
        Topology(("A", "B"), (Link("A", "C", 1.0),))
    with pytest.raises(TopologyError):
        Link("A", "A", 1.0)
    with pytest.raises(TopologyError):
        Link("A", "B", 0.0)


def test_active_subgraph_identity(triangle):
    assert active_subgraph(triangle) == triangle


def test_active_subgraph_all_inactive(triangle):
    off = triangle.with_inactive(l.key for l in triangle.links)
    sub = active_subgraph(off)
    assert sub.nodes == triangle.nodes
    assert sub.links == ()


def test_active_subgraph_one_inactive(triangle):
    sub = active_subgraph(triangle.with_inactive([("A", "C")]))
    assert len(sub.links) == 5
    assert set(sub.links) <= set(triangle.links)
    assert sub.nodes == triangle.nodes


def test_ring_topology_shapes():
    assert ring_topology(2).n_links == 2
    t = ring_topology(8, chords=2)
    assert t.n_nodes == 8
    assert t.n_links == 2 * (8 + 2)
