import numpy as np
import pytest

from greenroute.learn.cv import CrossValidationError, choose_k, cross_validate_k, fold_assignment
from greenroute.netmodel import ring_topology
from greenroute.traffic import assemble_feature_matrix, synth_factors, synth_snapshots


def test_every_sample_validated_once():
    fold_of = fold_assignment(53, 10, seed=4)
    counts = np.bincount(fold_of, minlength=10)
    assert counts.sum() == 53
    assert counts.max() - counts.min() <= 1
    assert np.array_equal(fold_of, fold_assignment(53, 10, seed=4))


def test_too_few_samples():
    with pytest.raises(CrossValidationError):
        fold_assignment(9, 10, 0)
    with pytest.raises(CrossValidationError):
        cross_validate_k(np.ones((5, 3)), np.ones(5), [1], folds=10)


def test_choose_k():
    ks = [1, 2, 3, 4, 5]
    acc = [60.0, 80.0, 95.0, 95.5, 95.4]
    assert choose_k(ks, acc, n=10) == 3
    assert choose_k(ks, acc, n=40) == 5


def low_rank_problem(latent=3, count=100, seed=0):
    t = ring_topology(6, chords=2)
    _, scores, _ = synth_factors(t, latent, count, seed)
    x = assemble_feature_matrix(synth_snapshots(t, latent, count, seed), t)
    y = 50 + 15 * (scores[:, 0] - scores[:, 1]) + 10 * (scores[:, 2] - 1.0)
    return x, y


def test_plateau_after_latent_dim():
    x, y = low_rank_problem()
    r = cross_validate_k(x, y, [1, 2, 3, 4, 6, 10], folds=10, seed=0)
    assert r.accuracy(3) > r.accuracy(1) + 10
    assert abs(r.accuracy(10) - r.accuracy(3)) < 1.0
    assert 3 <= r.chosen_k <= 3 + int(0.05 * 30)
    for row in r.rows:
        assert row.size_reduction == pytest.approx(100 * (1 - row.k / 30))
    assert [row.k for row in r.rows] == [1, 2, 3, 4, 6, 10]


def test_deterministic_and_parallel_equal():
    x, y = low_rank_problem(count=40, seed=1)
    a = cross_validate_k(x, np.column_stack([y, 100 - y]), [1, 3, 5], folds=5, seed=3)
    b = cross_validate_k(x, np.column_stack([y, 100 - y]), [1, 3, 5], folds=5, seed=3, jobs=3)
    assert a == b


def test_extra_column_helps():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(60, 4)) + 10
    known = rng.uniform(20, 80, size=60)
    y = 0.8 * known + 5
    plain = cross_validate_k(x, y, [2], folds=10, seed=0)
    cond = cross_validate_k(x, y, [2], folds=10, seed=0, extra=known)
    assert cond.accuracy(2) > plain.accuracy(2)
    assert cond.accuracy(2) > 99.9
