"""Utility-interval routing with link deactivation.

Flows are placed one at a time on a small set of loop-free candidate paths.
Each placement adds ``rate / capacity`` (as a percent) to every link of the
chosen path; links that end up carrying nothing are switched off and count as
energy saved.

Path choice for a flow (candidates from :func:`candidate_paths`):

1. a path is feasible when no link on it would exceed ``umax``;
2. among feasible paths prefer the one that switches on the fewest idle links,
   then the one with the most links landing inside ``[umin, umax]``, then the
   fewest hops, then candidate order;
3. when nothing is feasible take the path with the smallest worst-link
   utility and mark the flow as overloaded.

Flows are processed by decreasing rate, ties by (src, dst) node index, so the
outcome does not depend on the order demands appear in a file.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .netmodel import Topology
from .traffic import Flow, TrafficSnapshot

DEFAULT_PATHS_K = 4
_TOL = 1e-9


class RoutingError(RuntimeError):
    pass


class UnroutableFlow(RoutingError):
    def __init__(self, flow: Flow):
        self.flow = flow
        super().__init__(f"UNROUTABLE: no path for flow {flow.src}->{flow.dst} (rate {flow.rate})")


@dataclass(frozen=True)
class UtilityInterval:
    umin: float
    umax: float

    def __post_init__(self):
        if not 0 <= self.umin <= self.umax <= 100:
            raise ValueError(f"need 0 <= umin <= umax <= 100, got ({self.umin}, {self.umax})")


@dataclass(frozen=True)
class RoutingOutcome:
    utilities: dict[tuple[str, str], float]
    loads: dict[tuple[str, str], float]
    paths: dict[tuple[str, str], tuple[str, ...]]
    inactive_links: frozenset[tuple[str, str]]
    energy_saving: float
    avg_path_length: float
    overloaded: tuple[tuple[str, str], ...] = field(default=())


def candidate_paths(t: Topology, src: str, dst: str, k: int) -> list[tuple[str, ...]]:
    """Up to ``k`` simple paths over active links, by hop count then node-index order."""
    if src == dst:
        raise ValueError("candidate_paths needs src != dst")
    if k < 1:
        raise ValueError("k must be >= 1")
    for end in (src, dst):
        if end not in t.node_index:
            raise ValueError(f"unknown node {end!r}")
    succ = {n: t.successors(n) for n in t.nodes}
    dist = _hops_to(t, dst)
    if src not in dist:
        return []

    found: list[tuple[str, ...]] = []
    path = [src]
    on_path = {src}

    def extend(v: str, remaining: int) -> None:
        for w in succ[v]:
            if len(found) >= k:
                return
            if w in on_path:
                continue
            if w == dst:
                if remaining == 1:
                    found.append(tuple(path) + (dst,))
                continue
            if dist.get(w, t.n_nodes) <= remaining - 1:
                path.append(w)
                on_path.add(w)
                extend(w, remaining - 1)
                path.pop()
                on_path.discard(w)

    for hops in range(dist[src], t.n_nodes):
        extend(src, hops)
        if len(found) >= k:
            break
    return found


def _hops_to(t: Topology, dst: str) -> dict[str, int]:
    pred: dict[str, list[str]] = {n: [] for n in t.nodes}
    for l in t.links:
        if l.active:
            pred[l.dst].append(l.src)
    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        v = queue.popleft()
        for u in pred[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def flow_order(flows: Iterable[Flow], t: Topology) -> list[Flow]:
    idx = t.node_index
    return sorted(flows, key=lambda f: (-f.rate, idx[f.src], idx[f.dst]))


class Router:
    """Routing engine for one topology with cached candidate paths.

    Reusing one router across many utility intervals avoids recomputing the
    candidate paths, which dominates the cost of a single run.
    """

    def __init__(self, t: Topology, k: int = DEFAULT_PATHS_K):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.topology = t
        self.k = k
        self._link_pos = {l.key: i for i, l in enumerate(t.links)}
        self._caps = [l.capacity for l in t.links]
        self._cache: dict[tuple[str, str], list[tuple[tuple[str, ...], tuple[int, ...]]]] = {}

    def candidates(self, src: str, dst: str):
        key = (src, dst)
        if key not in self._cache:
            paths = candidate_paths(self.topology, src, dst, self.k)
            self._cache[key] = [
                (p, tuple(self._link_pos[(a, b)] for a, b in zip(p, p[1:]))) for p in paths
            ]
        return self._cache[key]

    def route(self, s: TrafficSnapshot, u: UtilityInterval) -> RoutingOutcome:
        t = self.topology
        s.validate(t)
        caps = self._caps
        load = [0.0] * len(caps)
        paths: dict[tuple[str, str], tuple[str, ...]] = {}
        overloaded = []
        umin, umax = u.umin, u.umax
        for f in flow_order(s.flows, t):
            if f.rate == 0:
                continue
            cands = self.candidates(f.src, f.dst)
            if not cands:
                raise UnroutableFlow(f)
            best_key = None
            best = None
            fallback_key = None
            fallback = None
            for rank, (nodes, links) in enumerate(cands):
                post = [100.0 * (load[e] + f.rate) / caps[e] for e in links]
                worst = max(post)
                if worst <= umax + _TOL:
                    new_links = sum(1 for e in links if load[e] == 0)
                    well = sum(1 for p in post if umin - _TOL <= p <= umax + _TOL)
                    key = (new_links, -well, len(links), rank)
                    if best_key is None or key < best_key:
                        best_key, best = key, (nodes, links)
                else:
                    key = (worst, rank)
                    if fallback_key is None or key < fallback_key:
                        fallback_key, fallback = key, (nodes, links)
            if best is None:
                best = fallback
                overloaded.append((f.src, f.dst))
            nodes, links = best
            for e in links:
                load[e] += f.rate
            paths[(f.src, f.dst)] = nodes
        return _outcome(t, load, paths, tuple(overloaded))


def _outcome(t: Topology, load, paths, overloaded) -> RoutingOutcome:
    loads = {}
    utilities = {}
    inactive = set()
    for l, ld in zip(t.links, load):
        loads[l.key] = ld
        utilities[l.key] = 100.0 * ld / l.capacity
        if ld == 0:
            inactive.add(l.key)
    inactive_links = frozenset(inactive)
    saving = 100.0 * len(inactive_links) / t.n_links if t.n_links else 0.0
    hops = [len(p) - 1 for p in paths.values()]
    avg = sum(hops) / len(hops) if hops else 0.0
    return RoutingOutcome(utilities, loads, paths, inactive_links, saving, avg, overloaded)


def route_mept(t: Topology, s: TrafficSnapshot, u: UtilityInterval, k: int = DEFAULT_PATHS_K) -> RoutingOutcome:
    """Route every positive-rate flow of ``s`` on ``t`` under interval ``u``."""
    return Router(t, k).route(s, u)


def energy_saving(o: RoutingOutcome, t: Topology) -> float:
    if not t.n_links:
        return 0.0
    return 100.0 * len(o.inactive_links) / t.n_links


def average_path_length(o: RoutingOutcome) -> float:
    if not o.paths:
        return 0.0
    return sum(len(p) - 1 for p in o.paths.values()) / len(o.paths)


def recompute_loads(t: Topology, s: TrafficSnapshot, paths) -> dict[tuple[str, str], float]:
    """Link loads rebuilt from chosen paths, in the same flow order as routing."""
    loads = {l.key: 0.0 for l in t.links}
    rates = {(f.src, f.dst): f.rate for f in s.flows}
    for f in flow_order(s.flows, t):
        p = paths.get((f.src, f.dst))
        if p is None:
            continue
        for a, b in zip(p, p[1:]):
            loads[(a, b)] += rates[(f.src, f.dst)]
    return loads


def write_outcome_csv(path: str | Path, o: RoutingOutcome, t: Topology) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "utility", "active"])
        for l in t.links:
            w.writerow([l.src, l.dst, f"{o.utilities[l.key]:.4f}", int(l.key not in o.inactive_links)])
        w.writerow(["energy_saving", "avg_path_length", "", ""])
        w.writerow([f"{o.energy_saving:.4f}", f"{o.avg_path_length:.4f}", "", ""])
