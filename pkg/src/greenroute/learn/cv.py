"""k-fold cross-validation over the number of principal components."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .pca import PcaModel, _as_array, pca_fit, pca_project, size_reduction, variance_retained
from .regression import prediction_accuracy, regress_fit, regress_predict


class CrossValidationError(ValueError):
    pass


@dataclass(frozen=True)
class CvRow:
    k: int
    size_reduction: float
    accuracy: float
    variance_retained: float


@dataclass(frozen=True)
class CvReport:
    rows: tuple[CvRow, ...]
    chosen_k: int
    n_features: int
    fold_of: tuple[int, ...]

    def row(self, k: int) -> CvRow:
        for r in self.rows:
            if r.k == k:
                return r
        raise KeyError(k)

    def accuracy(self, k: int) -> float:
        return self.row(k).accuracy


def fold_assignment(d: int, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample: a seeded shuffle split into near-equal parts."""
    if folds < 2:
        raise CrossValidationError("need at least 2 folds")
    if d < folds:
        raise CrossValidationError(f"{d} samples cannot fill {folds} folds")
    perm = np.random.default_rng(seed).permutation(d)
    fold_of = np.empty(d, dtype=int)
    for f, idx in enumerate(np.array_split(perm, folds)):
        fold_of[idx] = f
    return fold_of


def choose_k(ks, accuracies, n: int, margin: float = 1.0, inflate: float = 0.05) -> int:
    """Smallest k within ``margin`` points of the best accuracy, plus up to
    ``inflate * n`` extra components (capped at n)."""
    best = max(accuracies)
    base = min(k for k, a in zip(ks, accuracies) if a >= best - margin)
    return min(n, base + int(math.floor(inflate * n)))


def _fold_scores(x, y, extra, train, test, ks, eps) -> list[float]:
    model = pca_fit(x[train], 1)
    scores = []
    for k in ks:
        m = model.with_k(k)
        z_train = pca_project(m, x[train])
        z_test = pca_project(m, x[test])
        if extra is not None:
            z_train = np.column_stack([z_train, extra[train]])
            z_test = np.column_stack([z_test, extra[test]])
        accs = []
        for j in range(y.shape[1]):
            reg = regress_fit(z_train, y[train, j])
            pred = regress_predict(reg, z_test)
            accs += [prediction_accuracy(tv, pv, eps) for tv, pv in zip(y[test, j], np.atleast_1d(pred))]
        scores.append(float(np.mean(accs)))
    return scores


def cross_validate_k(x, labels, k_grid=None, folds: int = 10, seed: int = 0, eps: float = 3.0,
                     extra=None, jobs: int = 1) -> CvReport:
    """Mean held-out accuracy of PCA + linear regression for each k on the grid.

    ``labels`` may hold one target per column; accuracies are averaged over
    targets and held-out samples, then over folds. ``extra`` is an optional
    known-parameter column appended after projection (conditional models).
    Fold evaluations are independent; ``jobs > 1`` runs them on threads with
    identical results.
    """
    x = _as_array(x)
    d, n = x.shape
    y = np.asarray(labels, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[0] != d:
        raise CrossValidationError(f"{d} samples but {y.shape[0]} labels")
    if extra is not None:
        extra = np.asarray(extra, dtype=float).ravel()
    ks = list(range(1, n + 1)) if k_grid is None else sorted(set(int(k) for k in k_grid))
    if not ks or ks[0] < 1 or ks[-1] > n:
        raise CrossValidationError(f"k grid must lie within [1, {n}]")
    fold_of = fold_assignment(d, folds, seed)

    def run(f):
        test = np.flatnonzero(fold_of == f)
        train = np.flatnonzero(fold_of != f)
        return _fold_scores(x, y, extra, train, test, ks, eps)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            per_fold = list(pool.map(run, range(folds)))
    else:
        per_fold = [run(f) for f in range(folds)]
    acc = np.mean(np.array(per_fold), axis=0)

    full: PcaModel = pca_fit(x, 1)
    rows = tuple(
        CvRow(k, size_reduction(k, n), float(a), variance_retained(full.eigenvalues, k))
        for k, a in zip(ks, acc)
    )
    chosen = choose_k(ks, [r.accuracy for r in rows], n)
    return CvReport(rows, chosen, n, tuple(int(f) for f in fold_of))
