"""Principal component analysis of feature matrices (rows are samples)."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..traffic import FeatureMatrix
from .eig import eig_sym


class PcaError(ValueError):
    pass


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    eigenvalues: np.ndarray
    components: np.ndarray
    k: int
    degenerate: bool = False

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]

    @property
    def projection(self) -> np.ndarray:
        return self.components[:, : self.k]

    @property
    def variance_retained(self) -> float:
        return variance_retained(self.eigenvalues, self.k)

    @property
    def size_reduction(self) -> float:
        return size_reduction(self.k, self.n_features)

    def with_k(self, k: int) -> "PcaModel":
        """Same decomposition, different number of retained components."""
        _check_k(k, self.n_features)
        return replace(self, k=k)


def _as_array(x) -> np.ndarray:
    if isinstance(x, FeatureMatrix):
        return x.values
    return np.asarray(x, dtype=float)


def _check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise PcaError(f"k must lie in [1, {n}], got {k}")


def covariance(x) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and covariance normalised by the sample count d."""
    x = _as_array(x)
    mean = x.mean(axis=0)
    centred = x - mean
    return mean, centred.T @ centred / x.shape[0]


def pca_fit(x, k: int) -> PcaModel:
    x = _as_array(x)
    if x.ndim != 2:
        raise PcaError("pca_fit expects a 2-D matrix")
    d, n = x.shape
    _check_k(k, n)
    if d < 2:
        raise PcaError("pca_fit needs at least two samples")
    mean, cov = covariance(x)
    vals, vecs = eig_sym(cov)
    degenerate = not np.any(np.abs(cov) > 0)
    return PcaModel(mean, vals, vecs, k, degenerate)


def pca_project(m: PcaModel, x) -> np.ndarray:
    """(x - mean) @ W for a single vector or a row matrix."""
    x = _as_array(x)
    if x.shape[-1] != m.n_features:
        raise PcaError(f"expected {m.n_features} features, got {x.shape[-1]}")
    return (x - m.mean) @ m.projection


def pca_reconstruct(m: PcaModel, z) -> np.ndarray:
    """Map reduced coordinates back to feature space."""
    z = np.asarray(z, dtype=float)
    return z @ m.projection.T + m.mean


def variance_retained(eigenvalues, k: int) -> float:
    vals = np.asarray(eigenvalues, dtype=float)
    if not 0 <= k <= vals.shape[0]:
        raise PcaError(f"k must lie in [0, {vals.shape[0]}], got {k}")
    total = float(vals.sum())
    if total == 0:
        return 0.0
    return 100.0 * float(vals[:k].sum()) / total


def size_reduction(k: int, n: int) -> float:
    return 100.0 * (1.0 - k / n)
