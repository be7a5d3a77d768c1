"""Refining predicted utility thresholds and the exhaustive grid oracle."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .eeroute import DEFAULT_PATHS_K, Router, UtilityInterval
from .netmodel import Topology
from .traffic import TrafficSnapshot, to_feature_vector

DEFAULT_MAX_MOVES = 1000
_ROUND = 9


class RefineError(RuntimeError):
    pass


class EeEvaluator:
    """Counts calls to an energy-saving function of (umin, umax)."""

    def __init__(self, fn: Callable[[float, float], float]):
        self._fn = fn
        self.calls = 0

    def __call__(self, umin: float, umax: float) -> float:
        self.calls += 1
        return float(self._fn(umin, umax))

    @classmethod
    def for_snapshot(cls, t: Topology, s: TrafficSnapshot, k: int = DEFAULT_PATHS_K,
                     router: Router | None = None) -> "EeEvaluator":
        router = router or Router(t, k)
        s.validate(t)

        def ee(umin, umax):
            return router.route(s, UtilityInterval(umin, umax)).energy_saving

        return cls(ee)


@dataclass(frozen=True)
class TuneResult:
    umin: float
    umax: float
    ee: float
    evaluations: int

    @property
    def speedup(self) -> float:
        return speedup(self.evaluations)


def speedup(evaluations: int) -> float:
    if evaluations < 1:
        raise ValueError("evaluation count must be >= 1")
    return 100.0 / evaluations


def _inside(u: float, v: float) -> bool:
    return 0.0 <= u <= v <= 100.0


def refine(ee: EeEvaluator, umin0: float, umax0: float, alpha: float = 1.0, beta: float = 0.0,
           max_moves: int = DEFAULT_MAX_MOVES) -> TuneResult:
    """Two-phase hill climb from a predicted (umin, umax).

    Phase 1 steps umin by ``alpha`` toward its better neighbour until the
    saving changes by at most ``beta``; a step back onto an already visited
    umin ends the phase at the better of the two points. Phase 2 lowers umax
    by ``alpha`` while that does not reduce the saving. Neighbours outside
    ``0 <= umin <= umax <= 100`` are never evaluated and count as worse than
    anything. Each distinct point is evaluated once; ``evaluations`` is the
    number of evaluator calls made.
    """
    if not _inside(umin0, umax0):
        raise ValueError(f"start ({umin0}, {umax0}) must satisfy 0 <= umin <= umax <= 100")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if beta < 0:
        raise ValueError("beta must be non-negative")

    start_calls = ee.calls
    memo: dict[tuple[float, float], float] = {}

    def value(u, v):
        key = (round(u, _ROUND), round(v, _ROUND))
        if key not in memo:
            memo[key] = ee(*key)
        return memo[key]

    def probe(u, v):
        return value(u, v) if _inside(u, v) else -math.inf

    u, v = float(round(umin0, _ROUND)), float(round(umax0, _ROUND))
    visited = {u}
    moves = 0
    while True:
        cur = value(u, v)
        lo = round(u - alpha, _ROUND)
        hi = round(u + alpha, _ROUND)
        prev, nxt = probe(lo, v), probe(hi, v)
        if prev == nxt == -math.inf:
            break
        target = hi if prev < nxt else lo
        if target in visited:
            if value(target, v) > cur:
                u = target
            break
        moves += 1
        if moves > max_moves:
            raise RefineError(f"refine exceeded {max_moves} moves; landscape looks pathological")
        u = target
        visited.add(u)
        if abs(cur - value(u, v)) <= beta:
            break

    cur = value(u, v)
    while True:
        lower = round(v - alpha, _ROUND)
        if lower < u or lower < 0:
            break
        if probe(u, lower) >= cur:
            moves += 1
            if moves > max_moves:
                raise RefineError(f"refine exceeded {max_moves} moves; landscape looks pathological")
            v = lower
            cur = value(u, v)
        else:
            break

    return TuneResult(u, v, cur, ee.calls - start_calls)


def grid_values(step: float) -> list[float]:
    """0, step, 2*step, ... up to and including 100 when it lies on the grid."""
    if not step > 0:
        raise ValueError("step must be positive")
    count = int(math.floor(100.0 / step + 1e-9))
    return [float(round(i * step, _ROUND)) for i in range(count + 1)]


def brute_force_optimal(ee: EeEvaluator, step: float = 1.0) -> TuneResult:
    """Exhaustive sweep over the grid with umin <= umax.

    Ties go to the smallest umin, then the smallest umax.
    """
    grid = grid_values(step)
    start_calls = ee.calls
    best = None
    for u in grid:
        for v in grid:
            if v < u:
                continue
            val = ee(u, v)
            if best is None or val > best[0]:
                best = (val, u, v)
    val, u, v = best
    return TuneResult(u, v, val, ee.calls - start_calls)


def grid_size(step: float) -> int:
    g = len(grid_values(step))
    return g * (g + 1) // 2


@dataclass(frozen=True)
class Label:
    timestamp: str
    features: np.ndarray
    umin: float
    umax: float
    ee: float


def _label_one(args) -> Label:
    t, s, step, k = args
    res = brute_force_optimal(EeEvaluator.for_snapshot(t, s, k), step)
    return Label(s.timestamp, to_feature_vector(s, t), res.umin, res.umax, res.ee)


def label_snapshots(t: Topology, snapshots: Sequence[TrafficSnapshot], step: float = 5.0,
                    k: int = DEFAULT_PATHS_K, jobs: int = 1) -> list[Label]:
    """Brute-force optimal (umin, umax) for each snapshot, in input order."""
    work = [(t, s, step, k) for s in snapshots]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_label_one, work))
    return [_label_one(w) for w in work]
