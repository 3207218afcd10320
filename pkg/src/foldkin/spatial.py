"""Spatial (screw) vector algebra.

A spatial velocity is a 6-vector ``[omega, beta]`` pairing an angular and
a linear velocity, always understood relative to a frame anchored at some
point in space.  This module provides the operators that move such
vectors around a rigid body: the cross-product matrix, the 6x6 transfer
operator between anchor points, the embedding of a scalar hinge rate
along an axis, the 5x6 projection that forgets rotation about an axis,
and the point-velocity evaluation used by the truss conversion.

Frame rotations are fixed to the identity throughout; only anchor points
differ between frames, which is all first-order analysis requires.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroAxis

_AXIS_TOL = 1e-12


def cross_matrix(omega) -> np.ndarray:
    """3x3 antisymmetric matrix with ``cross_matrix(w) @ a == cross(w, a)``."""
    w1, w2, w3 = np.asarray(omega, dtype=float)
    return np.array([
        [0.0, -w3, w2],
        [w3, 0.0, -w1],
        [-w2, w1, 0.0],
    ])


@dataclass(frozen=True)
class SpatialVector:
    """Angular + linear velocity observed in a frame anchored at a point."""

    omega: np.ndarray
    beta: np.ndarray
    anchor: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        object.__setattr__(self, "anchor", np.asarray(self.anchor, dtype=float))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.omega, self.beta])


@dataclass(frozen=True)
class RigidTransfer:
    """6x6 operator moving a spatial velocity between two anchor points."""

    from_point: np.ndarray
    to_point: np.ndarray
    matrix: np.ndarray

    def __call__(self, nu: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(nu, dtype=float)


def rigid_transfer(from_point, to_point) -> RigidTransfer:
    """Transfer operator sending ``[w, b]`` at ``from_point`` to
    ``[w, w x (to - from) + b]`` at ``to_point``."""
    p = np.asarray(from_point, dtype=float)
    q = np.asarray(to_point, dtype=float)
    m = np.eye(6)
    m[3:, :3] = cross_matrix(p - q)
    return RigidTransfer(from_point=p, to_point=q, matrix=m)


def transfer_matrix(from_point, to_point) -> np.ndarray:
    """Bare 6x6 matrix of :func:`rigid_transfer`."""
    return rigid_transfer(from_point, to_point).matrix


def _unit_axis(axis) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n < _AXIS_TOL:
        raise ZeroAxis("hinge axis has zero length")
    return axis / n


@dataclass(frozen=True)
class HingeEmbedding:
    """6x1 embedding of a scalar hinge rate as rotation about an axis."""

    axis: np.ndarray
    matrix: np.ndarray

    def __call__(self, rate: float) -> np.ndarray:
        return self.matrix[:, 0] * float(rate)


def hinge_embedding(axis) -> HingeEmbedding:
    """Embed ``rate`` as the pure angular velocity ``rate * axis``."""
    axis = _unit_axis(axis)
    m = np.zeros((6, 1))
    m[:3, 0] = axis
    return HingeEmbedding(axis=axis, matrix=m)


def orthonormal_triad(axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic right-handed orthonormal triad ``(l, m, n)``.

    ``m`` comes from the standard basis vector least aligned with the
    axis, made orthonormal; ``n = l x m``.  The choice is a fixed rule so
    that projection matrices are reproducible across runs.
    """
    l = _unit_axis(axis)
    k = int(np.argmin(np.abs(l)))
    seed = np.zeros(3)
    seed[k] = 1.0
    m = seed - l[k] * l
    m = m / np.linalg.norm(m)
    n = np.cross(l, m)
    return l, m, n


@dataclass(frozen=True)
class AxisProjection:
    """5x6 projection onto the complement of rotation about an axis.

    Rows are orthonormal; the angular part of the image is expressed in
    the two triad directions orthogonal to the axis and the linear part
    is passed through unchanged.
    """

    axis: np.ndarray
    matrix: np.ndarray

    def __call__(self, nu: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(nu, dtype=float)


def edge_projection(axis) -> AxisProjection:
    """Projection killing exactly ``span{[axis, 0]}`` inside R^6."""
    l, m, n = orthonormal_triad(axis)
    p = np.zeros((5, 6))
    p[0, :3] = m
    p[1, :3] = n
    p[2:, 3:] = np.eye(3)
    return AxisProjection(axis=l, matrix=p)


def velocity_at_point(nu: SpatialVector, point) -> np.ndarray:
    """Linear velocity a rigid motion induces at a point.

    Transfers ``nu`` from its anchor to ``point`` and keeps the linear
    part: ``beta + omega x (point - anchor)``.
    """
    r = np.asarray(point, dtype=float) - nu.anchor
    return nu.beta + np.cross(nu.omega, r)
