"""Directed capacitated network graphs and topology file readers.

Two input formats are understood:

* the native line format::

      # comment
      node A
      node B
      link A B 10      # directed A->B
      edge B C 40      # undirected, expands to B->C and C->B

* the SNDlib native format subset (``NODES`` and ``LINKS`` sections). SNDlib
  links are undirected and expand to two directed links with equal capacity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable


class TopologyError(ValueError):
    """Malformed topology data; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


@dataclass(frozen=True)
class Link:
    src: str
    dst: str
    capacity: float
    active: bool = True

    def __post_init__(self):
        if not self.capacity > 0:
            raise TopologyError(f"link {self.src}->{self.dst}: capacity must be positive, got {self.capacity}")
        if self.src == self.dst:
            raise TopologyError(f"self-loop link {self.src}->{self.dst}")

    @property
    def key(self) -> tuple[str, str]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class Topology:
    """Immutable directed graph. Node order is significant (feature layout)."""

    nodes: tuple[str, ...]
    links: tuple[Link, ...]
    node_index: dict[str, int] = field(init=False, repr=False, compare=False)
    _by_key: dict[tuple[str, str], Link] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(self.nodes)
        links = tuple(self.links)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "links", links)
        index: dict[str, int] = {}
        for i, n in enumerate(nodes):
            if n in index:
                raise TopologyError(f"duplicate node {n!r}")
            index[n] = i
        by_key: dict[tuple[str, str], Link] = {}
        for link in links:
            for end in (link.src, link.dst):
                if end not in index:
                    raise TopologyError(f"link {link.src}->{link.dst}: unknown endpoint {end!r}")
            if link.key in by_key:
                raise TopologyError(f"duplicate link {link.src}->{link.dst}")
            by_key[link.key] = link
        object.__setattr__(self, "node_index", index)
        object.__setattr__(self, "_by_key", by_key)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_links(self) -> int:
        return len(self.links)

    def link(self, src: str, dst: str) -> Link:
        return self._by_key[(src, dst)]

    def has_link(self, src: str, dst: str) -> bool:
        return (src, dst) in self._by_key

    def successors(self, node: str, active_only: bool = True) -> list[str]:
        """Out-neighbours of ``node`` in node-index order."""
        out = [l.dst for l in self.links if l.src == node and (l.active or not active_only)]
        return sorted(out, key=self.node_index.__getitem__)

    def with_inactive(self, keys: Iterable[tuple[str, str]]) -> "Topology":
        """Copy with the given links switched off (all others unchanged)."""
        off = set(keys)
        unknown = off - self._by_key.keys()
        if unknown:
            raise TopologyError(f"unknown links {sorted(unknown)}")
        links = tuple(replace(l, active=False) if l.key in off else l for l in self.links)
        return Topology(self.nodes, links)


def active_subgraph(t: Topology) -> Topology:
    """Same node set, only the links that are switched on."""
    return Topology(t.nodes, tuple(l for l in t.links if l.active))


_SNDLIB_NODE = re.compile(r"^\s*(\S+)\s*\(.*\)\s*$")
_SNDLIB_LINK = re.compile(r"^\s*(\S+)\s*\(\s*(\S+)\s+(\S+)\s*\)\s*(.*)$")


def _is_sndlib(text: str) -> bool:
    return re.search(r"^\s*NODES\s*\(", text, re.MULTILINE) is not None


def _sndlib_sections(text: str, path: str | None):
    """Yield (section, lineno, line) for lines inside NAME ( ... ) blocks."""
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("?"):
            continue
        if section is None:
            m = re.match(r"^([A-Z_]+)\s*\($", line)
            if m:
                section = m.group(1)
            continue
        if line == ")":
            section = None
            continue
        yield section, lineno, line
    if section is not None:
        raise TopologyError(f"unterminated section {section}", path=path)


def sndlib_capacity(fields: list[str]) -> float:
    """Capacity of an SNDlib link from the fields after ``( src dst )``.

    The pre-installed capacity is used; when it is zero the first module
    capacity is taken instead (dynamic-trace networks often ship that way).
    """
    head = fields[0] if fields else ""
    cap = float(head)
    if cap > 0:
        return cap
    rest = " ".join(fields[4:])
    m = re.search(r"\(\s*([0-9.eE+-]+)", rest)
    if m:
        return float(m.group(1))
    return cap


def parse_sndlib_topology(text: str, path: str | None = None) -> Topology:
    nodes: list[str] = []
    links: list[Link] = []
    seen: set[tuple[str, str]] = set()
    node_set: set[str] = set()
    for section, lineno, line in _sndlib_sections(text, path):
        if section == "NODES":
            m = _SNDLIB_NODE.match(line)
            name = m.group(1) if m else line.split()[0]
            if name in node_set:
                raise TopologyError(f"duplicate node {name!r}", lineno, path)
            node_set.add(name)
            nodes.append(name)
        elif section == "LINKS":
            m = _SNDLIB_LINK.match(line)
            if not m:
                raise TopologyError(f"cannot parse link line {line!r}", lineno, path)
            _, a, b, tail = m.groups()
            try:
                cap = sndlib_capacity(tail.split())
            except ValueError as exc:
                raise TopologyError(f"bad capacity in {line!r}", lineno, path) from exc
            links.extend(_undirected(a, b, cap, lineno, path, node_set, seen))
    return _build(nodes, links, path)


def _undirected(a, b, cap, lineno, path, node_set, seen):
    out = []
    for s, d in ((a, b), (b, a)):
        out.append(_checked_link(s, d, cap, lineno, path, node_set, seen))
    return out


def _checked_link(s, d, cap, lineno, path, node_set, seen) -> Link:
    for end in (s, d):
        if end not in node_set:
            raise TopologyError(f"unknown endpoint {end!r}", lineno, path)
    if s == d:
        raise TopologyError(f"self-loop link {s}->{d}", lineno, path)
    if (s, d) in seen:
        raise TopologyError(f"duplicate link {s}->{d}", lineno, path)
    if not cap > 0:
        raise TopologyError(f"non-positive capacity {cap} on {s}->{d}", lineno, path)
    seen.add((s, d))
    return Link(s, d, cap)


def _build(nodes, links, path) -> Topology:
    try:
        return Topology(tuple(nodes), tuple(links))
    except TopologyError as exc:
        raise TopologyError(str(exc), path=path) from None


def parse_topology(text: str, path: str | None = None) -> Topology:
    """Parse topology text in either supported format."""
    if _is_sndlib(text):
        return parse_sndlib_topology(text, path)
    nodes: list[str] = []
    node_set: set[str] = set()
    links: list[Link] = []
    seen: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        kind = parts[0]
        if kind == "node":
            if len(parts) != 2:
                raise TopologyError("expected 'node <id>'", lineno, path)
            if links:
                raise TopologyError("node lines must precede link lines", lineno, path)
            if parts[1] in node_set:
                raise TopologyError(f"duplicate node {parts[1]!r}", lineno, path)
            node_set.add(parts[1])
            nodes.append(parts[1])
        elif kind in ("link", "edge"):
            if len(parts) != 4:
                raise TopologyError(f"expected '{kind} <src> <dst> <capacity>'", lineno, path)
            _, s, d, cap_s = parts
            try:
                cap = float(cap_s)
            except ValueError:
                raise TopologyError(f"bad capacity {cap_s!r}", lineno, path) from None
            if kind == "link":
                links.append(_checked_link(s, d, cap, lineno, path, node_set, seen))
            else:
                links.extend(_undirected(s, d, cap, lineno, path, node_set, seen))
        else:
            raise TopologyError(f"unknown directive {kind!r}", lineno, path)
    return _build(nodes, links, path)


def load_topology(path: str | Path) -> Topology:
    path = Path(path)
    return parse_topology(path.read_text(), str(path))


def format_topology(t: Topology) -> str:
    """Native-format text for ``t`` (directed ``link`` lines, inactive links kept)."""
    lines = [f"node {n}" for n in t.nodes]
    lines += [f"link {l.src} {l.dst} {l.capacity!r}" for l in t.links]
    return "\n".join(lines) + "\n"


def ring_topology(n: int, capacity: float = 100.0, chords: int = 0, prefix: str = "n") -> Topology:
    """Bidirectional ring of ``n`` nodes plus ``chords`` evenly spread shortcuts.

    Handy for tests and synthetic experiments when no SNDlib file is at hand.
    """
    if n < 2:
        raise ValueError("ring needs at least 2 nodes")
    names = [f"{prefix}{i}" for i in range(n)]
    pairs: list[tuple[int, int]] = []
    for i in range(n):
        j = (i + 1) % n
        if n == 2 and i == 1:
            break
        pairs.append((i, j))
    half = n // 2
    for c in range(chords):
        i = (c * max(1, half // max(chords, 1))) % n
        j = (i + half) % n
        a, b = min(i, j), max(i, j)
        if a != b and (a, b) not in pairs and (b, a) not in pairs and (b - a) % n not in (1, n - 1):
            pairs.append((a, b))
    links = []
    for a, b in pairs:
        links.append(Link(names[a], names[b], capacity))
        links.append(Link(names[b], names[a], capacity))
    return Topology(tuple(names), tuple(links))
