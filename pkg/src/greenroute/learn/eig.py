"""Symmetric eigensolver: cyclic Jacobi rotations.

Sweeps use a round-robin pairing so every round rotates n/2 disjoint index
pairs at once; one sweep annihilates each off-diagonal pair exactly once, as
in the classical cyclic-by-row scheme. The working matrix is kept permuted so
that the pairs of the current round sit in adjacent rows/columns, which turns
each round into contiguous 2x2 block updates.
"""

from __future__ import annotations

import numpy as np


class EigenError(ValueError):
    pass


def _round_orders(m: int) -> list[np.ndarray]:
    """For even m: m-1 orderings; positions (2i, 2i+1) hold one round's pair."""
    players = list(range(m))
    orders = []
    for _ in range(m - 1):
        order = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            order += [min(a, b), max(a, b)]
        orders.append(np.array(order))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return orders


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def eig_sym(c, tol: float = 1e-12, max_sweeps: int = 100, sym_tol: float = 1e-10):
    """Eigen-decomposition of a real symmetric matrix.

    Returns ``(eigenvalues, vectors)`` with eigenvalues in descending order and
    eigenvectors as orthonormal columns. Each vector is signed so that its
    largest-magnitude entry is positive.

    Iteration stops once the off-diagonal Frobenius norm falls below
    ``tol * ||c||_F``; :class:`EigenError` is raised for asymmetric input or
    when ``max_sweeps`` sweeps do not reach that point.
    """
    a = np.array(c, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EigenError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise EigenError("matrix has non-finite entries")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(a - a.T))) > sym_tol * scale:
        raise EigenError("matrix is not symmetric")
    a = 0.5 * (a + a.T)

    # odd sizes get a zero pad row/column; rotations never touch it
    m = n + (n % 2)
    work = np.zeros((m, m))
    work[:n, :n] = a
    vt = np.eye(m)

    total = float(np.linalg.norm(a))
    if n > 1 and total > 0:
        threshold = tol * total
        orders = _round_orders(m)
        cur = np.arange(m)
        for sweep in range(max_sweeps + 1):
            if _off_norm(work) <= threshold:
                break
            if sweep == max_sweeps:
                raise EigenError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
            for order in orders:
                inv = np.empty(m, dtype=int)
                inv[cur] = np.arange(m)
                g = inv[order]
                work = work[g][:, g]
                vt = vt[g]
                cur = order
                work, vt = _rotate_adjacent(work, vt)

    # drop the pad: its eigenvector stays the unit vector on the pad coordinate
    vals = np.diag(work).copy()
    v = vt.T
    if m != n:
        keep = v[n, :] != 1.0
        vals = vals[keep]
        v = v[:n, keep]
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    v = np.ascontiguousarray(v[:, order])
    for j in range(n):
        i = int(np.argmax(np.abs(v[:, j])))
        if v[i, j] < 0:
            v[:, j] = -v[:, j]
    return vals, v


def _rotation(app, aqq, apq):
    nz = apq != 0.0
    with np.errstate(over="ignore"):
        theta = np.divide(aqq - app, 2.0 * apq, out=np.zeros_like(apq), where=nz)
    abs_theta = np.abs(theta)
    big = abs_theta > 1e150
    safe = np.where(big, 1.0, theta)
    t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(safe) + np.sqrt(safe * safe + 1.0))
    t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
    t = np.where(nz, t, 0.0)
    cs = 1.0 / np.sqrt(t * t + 1.0)
    return cs, t * cs


def _row_rotate(x: np.ndarray, cs: np.ndarray, sn: np.ndarray) -> np.ndarray:
    """J^T x for the block rotation J acting on row pairs (2i, 2i+1)."""
    r0 = x[0::2]
    r1 = x[1::2]
    out = np.empty_like(x)
    out[0::2] = cs[:, None] * r0 - sn[:, None] * r1
    out[1::2] = sn[:, None] * r0 + cs[:, None] * r1
    return out


def _rotate_adjacent(a: np.ndarray, vt: np.ndarray):
    """Zero a[2i, 2i+1] for every i with one similarity transform J^T A J.

    ``vt`` holds the accumulated eigenvectors as rows. Uses
    J^T A J = J^T (J^T A)^T for symmetric A, so only row operations are needed.
    """
    m = a.shape[0]
    ev = np.arange(0, m, 2)
    od = ev + 1
    cs, sn = _rotation(a[ev, ev], a[od, od], a[ev, od])
    a = _row_rotate(_row_rotate(a, cs, sn).T, cs, sn)
    a[ev, od] = 0.0
    a[od, ev] = 0.0
    return a, _row_rotate(vt, cs, sn)
