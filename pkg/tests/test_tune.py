import itertools

import pytest
from hypothesis import given, settings, strategies as st

from greenroute.eeroute import UtilityInterval, route_mept
from greenroute.netmodel import ring_topology
from greenroute.traffic import TrafficSnapshot, scale_snapshot, synth_snapshots
from greenroute.tune import (
    EeEvaluator,
    RefineError,
    brute_force_optimal,
    grid_size,
    grid_values,
    label_snapshots,
    refine,
    speedup,
)

from conftest import full_triangle, snapshot


def cone(u, v):
    return 100 - abs(u - 30) - abs(v - 70)


class Recorder(EeEvaluator):
    def __init__(self, fn):
        super().__init__(fn)
        self.points = []

    def __call__(self, u, v):
        self.points.append((u, v))
        return super().__call__(u, v)


def test_closed_form_landscape():
    ee = EeEvaluator(cone)
    r = refine(ee, 25, 80, alpha=1, beta=0)
    assert (r.umin, r.umax, r.ee) == (30, 70, 100)
    assert r.evaluations == ee.calls


def test_already_optimal():
    r = refine(EeEvaluator(cone), 30, 70)
    assert abs(r.umin - 30) <= 1 and abs(r.umax - 70) <= 1
    assert r.evaluations <= 6


def test_speedup_values():
    assert speedup(7) == pytest.approx(14.29, abs=0.005)
    r = refine(EeEvaluator(cone), 25, 80)
    assert r.speedup * r.evaluations == 100


def test_brute_force_closed_form():
    ee = EeEvaluator(cone)
    r = brute_force_optimal(ee, 1)
    assert (r.umin, r.umax, r.ee) == (30, 70, 100)
    assert r.evaluations == ee.calls == grid_size(1) == 101 * 102 // 2


def test_brute_force_constant_tie_break():
    r = brute_force_optimal(EeEvaluator(lambda u, v: 7.0), 10)
    assert (r.umin, r.umax) == (0, 0)


def test_grid_values():
    assert grid_values(25) == [0, 25, 50, 75, 100]
    assert grid_values(30) == [0, 30, 60, 90]
    with pytest.raises(ValueError):
        grid_values(0)


def test_brute_force_on_triangle_matches_enumeration():
    t = full_triangle()
    s = snapshot(("A", "C", 4.0), ("B", "C", 3.0), ("A", "B", 5.0), ("C", "A", 2.0))
    r = brute_force_optimal(EeEvaluator.for_snapshot(t, s), 10)
    best = None
    for u, v in itertools.product(range(0, 101, 10), repeat=2):
        if u <= v:
            e = route_mept(t, s, UtilityInterval(u, v)).energy_saving
            if best is None or e > best[0]:
                best = (e, u, v)
    assert (r.ee, r.umin, r.umax) == best


def test_boundary_points_never_evaluated():
    ee = Recorder(lambda u, v: -u - abs(v - 100))
    r = refine(ee, 0, 100)
    assert (r.umin, r.umax) == (0, 100)
    assert all(0 <= u <= v <= 100 for u, v in ee.points)


def test_phase_two_stops_at_umin():
    r = refine(EeEvaluator(lambda u, v: 5.0), 40, 60)
    assert r.umax >= r.umin


def test_move_cap():
    ee = EeEvaluator(lambda u, v: u)
    with pytest.raises(RefineError):
        refine(ee, 0, 100, max_moves=10)


def test_start_validation():
    for a, b in [(60, 50), (-1, 10), (0, 101)]:
        with pytest.raises(ValueError):
            refine(EeEvaluator(cone), a, b)
    with pytest.raises(ValueError):
        refine(EeEvaluator(cone), 10, 20, alpha=0)


landscape_tables = st.lists(st.integers(0, 20), min_size=21 * 21, max_size=21 * 21)


@settings(max_examples=80, deadline=None)
@given(landscape_tables, st.integers(0, 20), st.integers(0, 20), st.sampled_from([0, 1, 3]))
def test_refine_invariants_on_arbitrary_landscapes(table, a, b, beta):
    # 21x21 grid scaled by 5 so alpha=5 moves stay on it
    def fn(u, v):
        return float(table[int(u // 5) * 21 + int(v // 5)])

    u0, v0 = 5 * min(a, b), 5 * max(a, b)
    ee = Recorder(fn)
    start = fn(u0, v0)
    r = refine(ee, u0, v0, alpha=5, beta=beta)
    assert r.ee >= start - beta
    assert r.evaluations == ee.calls == len(set(ee.points))
    assert r.speedup * r.evaluations == pytest.approx(100, abs=1e-12)
    assert all(0 <= u <= v <= 100 for u, v in ee.points)
    oracle = brute_force_optimal(EeEvaluator(fn), 5)
    assert r.ee <= oracle.ee


def test_labels_deterministic_and_zero_traffic():
    t = ring_topology(5, chords=1)
    snaps = [TrafficSnapshot("zero", ())] + synth_snapshots(t, 2, 2, seed=1, mean_rate=15)
    a = label_snapshots(t, snaps, step=20)
    b = label_snapshots(t, snaps, step=20)
    assert [(l.timestamp, l.umin, l.umax, l.ee) for l in a] == [(l.timestamp, l.umin, l.umax, l.ee) for l in b]
    assert (a[0].umin, a[0].umax, a[0].ee) == (0, 0, 100)
    assert a[1].features.shape == (20,)


def test_labels_parallel_equal_sequential():
    t = ring_topology(5, chords=1)
    snaps = synth_snapshots(t, 2, 3, seed=4, mean_rate=15)
    seq = label_snapshots(t, snaps, step=25)
    par = label_snapshots(t, snaps, step=25, jobs=2)
    assert [(l.umin, l.umax, l.ee) for l in seq] == [(l.umin, l.umax, l.ee) for l in par]


def test_labels_track_volume():
    t = ring_topology(6, chords=2)
    snaps = synth_snapshots(t, 2, 4, seed=0, mean_rate=8)
    low = label_snapshots(t, [scale_snapshot(s, 10) for s in snaps], step=5)
    high = label_snapshots(t, [scale_snapshot(s, 90) for s in snaps], step=5)
    assert [(l.umin, l.umax) for l in low] != [(l.umin, l.umax) for l in high]
