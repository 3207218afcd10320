"""Rank-revealing linear algebra helpers.

All rank decisions in the package go through this module so that a single
tolerance policy applies everywhere: a singular value counts as nonzero
when it exceeds ``tol`` times the largest singular value of the same
matrix.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-9


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return a


def _cutoff(s: np.ndarray, tol: float, scale: float) -> float:
    top = float(s[0]) if s.size else 0.0
    return tol * max(top, scale)


def svd_rank(a, tol: float = DEFAULT_TOL, scale: float = 0.0) -> int:
    """Numerical rank with a relative singular-value cutoff.

    ``scale`` optionally anchors the cutoff: singular values must exceed
    ``tol * max(largest, scale)``.  Pass the natural magnitude of a
    meaningful entry (for maps between orthonormal bases, 1.0) so that a
    matrix that should be zero, but carries rounding noise, reports rank
    zero instead of spurious full rank.
    """
    a = _as_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > _cutoff(s, tol, scale)))


def nullspace(a, tol: float = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``a``.

    A matrix with zero rows has full kernel, so the identity is returned.
    """
    a = _as_matrix(a)
    m, n = a.shape
    if m == 0 or n == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    rank = int(np.sum(s > _cutoff(s, tol, scale)))
    if m >= n:
        # Economy decomposition already carries all right singular vectors.
        return vh[rank:].T.copy()
    if rank == 0:
        return np.eye(n)
    # Wide matrix: the kernel is the orthogonal complement of the row
    # space; a complete QR of the (SVD-determined) row-space basis
    # produces it without decomposing an n-by-n matrix.
    q, _ = np.linalg.qr(vh[:rank].T, mode="complete")
    return q[:, rank:]


def column_space(a, tol: float = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the range of ``a``."""
    a = _as_matrix(a)
    m = a.shape[0]
    if a.size == 0:
        return np.zeros((m, 0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m, 0))
    rank = int(np.sum(s > _cutoff(s, tol, scale)))
    return u[:, :rank].copy()


def pseudoinverse(a, tol: float = DEFAULT_TOL, scale: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse under the shared cutoff policy."""
    a = _as_matrix(a)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]))
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[1], a.shape[0]))
    cut = _cutoff(s, tol, scale)
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return (vh.T * inv) @ u.T


def subspace_residual(basis_a: np.ndarray, basis_b: np.ndarray) -> float:
    """Operator-norm distance between the projectors of two subspaces.

    Both arguments are matrices with orthonormal columns.  The result is
    0 exactly when the subspaces coincide and 1 when one contains a
    direction orthogonal to the other.
    """
    pa = basis_a @ basis_a.T
    pb = basis_b @ basis_b.T
    if pa.size == 0 and pb.size == 0:
        return 0.0
    return float(np.linalg.norm(pa - pb, 2))


def relative_residual(value: np.ndarray, scale: np.ndarray | float) -> float:
    """``|value| / max(1, |scale|)`` with infinity norms."""
    v = float(np.max(np.abs(value))) if np.size(value) else 0.0
    if isinstance(scale, (int, float)):
        s = abs(float(scale))
    else:
        s = float(np.max(np.abs(scale))) if np.size(scale) else 0.0
    return v / max(1.0, s)
