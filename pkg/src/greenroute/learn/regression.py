"""Least-squares regression of utility thresholds and the accuracy metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TARGETS = ("umin", "umax", "umin_given_umax", "umax_given_umin")
RIDGE = 1e-8


class RegressionError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionModel:
    """``weights[0]`` is the bias; conditional targets carry one extra trailing weight
    for the known threshold."""

    weights: np.ndarray
    target: str = "umin"
    ridge: bool = False

    def __post_init__(self):
        if self.target not in TARGETS:
            raise RegressionError(f"unknown target {self.target!r}")
        w = np.asarray(self.weights, dtype=float)
        if not np.all(np.isfinite(w)):
            raise RegressionError("non-finite regression weights")
        object.__setattr__(self, "weights", w)

    @property
    def n_inputs(self) -> int:
        return self.weights.shape[0] - 1

    @property
    def conditional(self) -> bool:
        return "_given_" in self.target


def design(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim == 1:
        z = z[:, None]
    return np.hstack([np.ones((z.shape[0], 1)), z])


def regress_fit(z, y, target: str = "umin") -> RegressionModel:
    """Minimise ||[1 Z] w - y||^2.

    Rank-deficient designs fall back to ridge damping ``RIDGE * I`` on the
    normal equations; the returned model is flagged via ``ridge=True``.
    """
    a = design(z)
    y = np.asarray(y, dtype=float).ravel()
    if a.shape[0] != y.shape[0]:
        raise RegressionError(f"{a.shape[0]} rows but {y.shape[0]} labels")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
        raise RegressionError("non-finite regression input")
    rank = np.linalg.matrix_rank(a)
    if rank == a.shape[1]:
        w, *_ = np.linalg.lstsq(a, y, rcond=None)
        return RegressionModel(w, target)
    gram = a.T @ a + RIDGE * np.eye(a.shape[1])
    w = np.linalg.solve(gram, a.T @ y)
    return RegressionModel(w, target, ridge=True)


def regress_raw(m: RegressionModel, z) -> np.ndarray | float:
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != m.n_inputs:
        raise RegressionError(f"model expects {m.n_inputs} inputs, got {z.shape[-1]}")
    out = m.weights[0] + z @ m.weights[1:]
    return float(out) if np.ndim(out) == 0 else out


def regress_predict(m: RegressionModel, z):
    """Prediction clamped to the utility range [0, 100]."""
    raw = regress_raw(m, z)
    out = np.clip(raw, 0.0, 100.0)
    return float(out) if np.ndim(out) == 0 else out


def prediction_accuracy(tv: float, pv: float, eps: float = 3.0) -> float:
    """Percent accuracy ``100 (1 - |tv - pv| / tv)`` clamped to [0, 100].

    At ``tv == 0`` the ratio is undefined: the prediction counts as fully
    accurate when ``pv <= eps`` and as 0 otherwise.
    """
    if tv < 0:
        raise ValueError("true value must be non-negative")
    if tv == 0:
        return 100.0 if pv <= eps else 0.0
    return min(100.0, max(0.0, 100.0 * (1.0 - abs(tv - pv) / tv)))


def within_tolerance(tv: float, pv: float, eps: float = 3.0) -> bool:
    """True when the prediction is within ``eps`` utility points of the truth."""
    return abs(tv - pv) <= eps
