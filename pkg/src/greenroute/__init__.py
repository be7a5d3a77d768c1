"""Offline lab for traffic-aware energy-efficient routing parameter prediction."""

from importlib import resources

from .netmodel import Link, Topology, TopologyError, active_subgraph, load_topology

__all__ = ["Link", "Topology", "TopologyError", "active_subgraph", "load_topology", "bundled_topology"]
__version__ = "0.1.0"


def bundled_topology(name: str = "abilene") -> Topology:
    """Load a topology shipped with the package (currently only ``abilene``)."""
    ref = resources.files(__name__) / "data" / f"{name}.txt"
    from .netmodel import parse_topology

    return parse_topology(ref.read_text(), f"<bundled {name}>")
