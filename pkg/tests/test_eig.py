import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from greenroute.learn.eig import EigenError, eig_sym


def test_diagonal():
    vals, vecs = eig_sym(np.diag([3.0, 1.0]))
    assert vals.tolist() == [3.0, 1.0]
    assert np.array_equal(vecs, np.eye(2))


def test_diagonal_reordered():
    vals, vecs = eig_sym(np.diag([1.0, 3.0]))
    assert vals.tolist() == [3.0, 1.0]
    assert np.array_equal(vecs, [[0.0, 1.0], [1.0, 0.0]])


def test_two_by_two_by_hand():
    # characteristic polynomial (2-l)^2 - 1 = 0 -> l = 3, 1
    vals, vecs = eig_sym([[2.0, 1.0], [1.0, 2.0]])
    assert vals == pytest.approx([3.0, 1.0], abs=1e-14)
    r = 1 / np.sqrt(2)
    assert np.allclose(vecs[:, 0], [r, r], atol=1e-14)
    assert np.allclose(vecs[:, 1], [r, -r], atol=1e-14)


def test_random_five_reconstructs():
    rng = np.random.default_rng(42)
    a = rng.normal(size=(5, 5))
    c = a + a.T
    vals, vecs = eig_sym(c)
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - c).max() < 1e-9
    assert np.abs(vecs.T @ vecs - np.eye(5)).max() < 1e-12


def test_matches_library_eigenvalues():
    rng = np.random.default_rng(1)
    for n in (1, 2, 3, 7, 16, 33):
        a = rng.normal(size=(n, n))
        c = a + a.T
        vals, _ = eig_sym(c)
        assert np.allclose(vals, np.linalg.eigvalsh(c)[::-1], atol=1e-10)


def test_sign_convention():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    _, vecs = eig_sym(a @ a.T)
    for j in range(6):
        col = vecs[:, j]
        assert col[np.argmax(np.abs(col))] > 0


def test_degenerate_spectrum():
    vals, vecs = eig_sym(np.eye(4) * 2.5)
    assert vals.tolist() == [2.5] * 4
    assert np.allclose(vecs.T @ vecs, np.eye(4))
    vals, vecs = eig_sym(np.zeros((3, 3)))
    assert vals.tolist() == [0.0] * 3


def test_rank_deficient_covariance():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(4, 9))
    c = x.T @ x / 4
    vals, vecs = eig_sym(c)
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - c).max() < 1e-10
    assert np.all(vals > -1e-10)
    assert np.sum(vals > 1e-8) == 4


def test_errors():
    with pytest.raises(EigenError, match="not symmetric"):
        eig_sym([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(EigenError):
        eig_sym(np.ones((2, 3)))
    with pytest.raises(EigenError, match="did not converge"):
        rng = np.random.default_rng(0)
        a = rng.normal(size=(8, 8))
        eig_sym(a + a.T, max_sweeps=1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: arrays(
    np.float64, (n, n), elements=st.floats(-1e3, 1e3, allow_nan=False))))
def test_property_reconstruction(a):
    c = (a + a.T) / 2
    vals, vecs = eig_sym(c)
    scale = max(1.0, np.abs(c).max())
    assert np.abs(vecs @ np.diag(vals) @ vecs.T - c).max() < 1e-10 * scale * c.shape[0]
    assert np.abs(vecs.T @ vecs - np.eye(c.shape[0])).max() < 1e-10
    assert np.all(np.diff(vals) <= 0)
