"""Traffic snapshots and their fixed-width feature encoding."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .netmodel import Topology


class TrafficError(ValueError):
    pass


@dataclass(frozen=True)
class Flow:
    src: str
    dst: str
    rate: float

    def __post_init__(self):
        if self.src == self.dst:
            raise TrafficError(f"flow {self.src}->{self.dst}: source equals destination")
        if not self.rate >= 0:
            raise TrafficError(f"flow {self.src}->{self.dst}: negative rate {self.rate}")


@dataclass(frozen=True)
class TrafficSnapshot:
    timestamp: str
    flows: tuple[Flow, ...]

    def __post_init__(self):
        flows = tuple(self.flows)
        object.__setattr__(self, "flows", flows)
        seen = set()
        for f in flows:
            if (f.src, f.dst) in seen:
                raise TrafficError(f"duplicate demand {f.src}->{f.dst} in snapshot {self.timestamp}")
            seen.add((f.src, f.dst))

    def validate(self, t: Topology) -> "TrafficSnapshot":
        for f in self.flows:
            for end in (f.src, f.dst):
                if end not in t.node_index:
                    raise TrafficError(f"snapshot {self.timestamp}: unknown node {end!r}")
        return self

    @property
    def total_rate(self) -> float:
        return float(sum(f.rate for f in self.flows))


@dataclass(frozen=True)
class FeatureMatrix:
    """d x n sample matrix, one row per snapshot (rows are samples)."""

    values: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1:
            raise TrafficError(f"feature matrix must be 2-D with at least one row, got shape {v.shape}")
        if len(self.labels) != v.shape[0]:
            raise TrafficError("one label per row required")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _parse_rate(s, lineno, path):
    try:
        return float(s)
    except ValueError:
        raise TrafficError(f"{path}:{lineno}: bad rate {s!r}") from None


_SNDLIB_DEMAND = re.compile(r"^\s*(\S+)\s*\(\s*(\S+)\s+(\S+)\s*\)\s*(\S+)\s+(\S+)")


def parse_snapshot(text: str, t: Topology, timestamp: str = "", path: str = "<string>") -> TrafficSnapshot:
    """Parse ``demand <src> <dst> <rate>`` lines or an SNDlib DEMANDS section.

    An optional ``timestamp <label>`` line overrides ``timestamp``.
    """
    flows: list[Flow] = []
    if re.search(r"^\s*DEMANDS\s*\(", text, re.MULTILINE):
        in_demands = False
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not in_demands:
                in_demands = re.match(r"^DEMANDS\s*\($", line) is not None
                continue
            if line == ")":
                break
            if not line:
                continue
            m = _SNDLIB_DEMAND.match(line)
            if not m:
                raise TrafficError(f"{path}:{lineno}: cannot parse demand line {line!r}")
            _, s, d, _unit, value = m.groups()
            if s == d:
                continue
            flows.append(_flow(s, d, _parse_rate(value, lineno, path), lineno, path))
    else:
        for lineno, raw in enumerate(text.splitlines(), 1):
            parts = raw.split("#", 1)[0].split()
            if not parts:
                continue
            if parts[0] == "timestamp" and len(parts) == 2:
                timestamp = parts[1]
            elif parts[0] == "demand" and len(parts) == 4:
                flows.append(_flow(parts[1], parts[2], _parse_rate(parts[3], lineno, path), lineno, path))
            else:
                raise TrafficError(f"{path}:{lineno}: expected 'demand <src> <dst> <rate>'")
    try:
        snap = TrafficSnapshot(timestamp, tuple(flows))
        return snap.validate(t)
    except TrafficError as exc:
        raise TrafficError(f"{path}: {exc}") from None


def _flow(s, d, rate, lineno, path) -> Flow:
    try:
        return Flow(s, d, rate)
    except TrafficError as exc:
        raise TrafficError(f"{path}:{lineno}: {exc}") from None


def load_snapshot(path: str | Path, t: Topology) -> TrafficSnapshot:
    path = Path(path)
    return parse_snapshot(path.read_text(), t, timestamp=path.stem, path=str(path))


def format_snapshot(s: TrafficSnapshot) -> str:
    lines = [f"timestamp {s.timestamp}"] if s.timestamp else []
    lines += [f"demand {f.src} {f.dst} {f.rate!r}" for f in s.flows]
    return "\n".join(lines) + "\n"


def save_snapshot(path: str | Path, s: TrafficSnapshot) -> None:
    Path(path).write_text(format_snapshot(s))


def load_snapshot_dir(directory: str | Path, t: Topology) -> list[TrafficSnapshot]:
    """All ``*.txt`` snapshot files of a directory, sorted by file name."""
    files = sorted(Path(directory).glob("*.txt"))
    if not files:
        raise TrafficError(f"no snapshot files in {directory}")
    return [load_snapshot(p, t) for p in files]


def scale_snapshot(s: TrafficSnapshot, volume_percent: float) -> TrafficSnapshot:
    if not 0 < volume_percent <= 100:
        raise TrafficError(f"volume percent must lie in (0, 100], got {volume_percent}")
    factor = volume_percent / 100.0
    flows = tuple(Flow(f.src, f.dst, f.rate * factor) for f in s.flows)
    return TrafficSnapshot(f"{s.timestamp}@{volume_percent:g}%", flows)


def pair_layout(t: Topology) -> list[tuple[int, int]]:
    """Ordered pairs (i, j), i != j, row-major in node-index order."""
    n = t.n_nodes
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def _pair_offset(i: int, j: int, n: int) -> int:
    return i * (n - 1) + (j if j < i else j - 1)


def to_feature_vector(s: TrafficSnapshot, t: Topology) -> np.ndarray:
    n = t.n_nodes
    vec = np.zeros(n * (n - 1))
    idx = t.node_index
    for f in s.flows:
        vec[_pair_offset(idx[f.src], idx[f.dst], n)] = f.rate
    return vec


def from_feature_vector(vec: Sequence[float], t: Topology, timestamp: str = "") -> TrafficSnapshot:
    """Inverse of :func:`to_feature_vector`; zero entries become absent demands."""
    vec = np.asarray(vec, dtype=float)
    n = t.n_nodes
    if vec.shape != (n * (n - 1),):
        raise TrafficError(f"expected vector of length {n * (n - 1)}, got {vec.shape}")
    flows = []
    for (i, j), r in zip(pair_layout(t), vec):
        if r != 0:
            flows.append(Flow(t.nodes[i], t.nodes[j], float(r)))
    return TrafficSnapshot(timestamp, tuple(flows))


def assemble_feature_matrix(snapshots: Sequence[TrafficSnapshot], t: Topology) -> FeatureMatrix:
    if not snapshots:
        raise TrafficError("cannot assemble a feature matrix from zero snapshots")
    rows = np.vstack([to_feature_vector(s, t) for s in snapshots])
    return FeatureMatrix(rows, tuple(s.timestamp for s in snapshots))


def synth_factors(t: Topology, latent_dim: int, count: int, seed: int,
                  mean_rate: float = 1.0, noise: float = 0.01):
    """Latent structure behind :func:`synth_snapshots`.

    Returns ``(loadings, scores, noise_matrix)`` with shapes (n, latent_dim),
    (count, latent_dim) and (count, n). Rates are
    ``max(0, scores @ loadings.T + noise_matrix)``.
    """
    if latent_dim < 1 or count < 1:
        raise TrafficError("latent_dim and count must be >= 1")
    n = t.n_nodes * (t.n_nodes - 1)
    rng = np.random.default_rng(seed)
    loadings = rng.exponential(mean_rate / latent_dim, size=(n, latent_dim))
    scores = rng.uniform(0.25, 1.75, size=(count, latent_dim))
    eps = rng.normal(0.0, noise * mean_rate, size=(count, n))
    return loadings, scores, eps


def synth_snapshots(t: Topology, latent_dim: int, count: int, seed: int,
                    mean_rate: float = 1.0, noise: float = 0.01,
                    prefix: str = "synth") -> list[TrafficSnapshot]:
    """Snapshots whose demand vectors lie near a ``latent_dim``-dimensional subspace."""
    loadings, scores, eps = synth_factors(t, latent_dim, count, seed, mean_rate, noise)
    rates = np.maximum(0.0, scores @ loadings.T + eps)
    return [from_feature_vector(row, t, f"{prefix}-{i:04d}") for i, row in enumerate(rates)]
