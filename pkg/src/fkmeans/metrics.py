"""Distances between fitted parameters and clustering agreement scores.

Fitted subspace-clustering solutions are only identified up to a ``q x q``
orthogonal rotation, so besides the plain Frobenius/Hausdorff/product
distances this module provides :func:`aligned_distance`, which measures the
product distance after the best loading rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import procrustes_rotation
from .model import Centroids, Loading, Membership


@dataclass(frozen=True)
class ParamPoint:
    """A candidate solution ``(loading, centroids)`` with a shared q."""

    loading: Loading
    centroids: Centroids

    def __post_init__(self):
        if self.loading.q != self.centroids.q:
            raise ValueError(
                f"loading q={self.loading.q} but centroids q={self.centroids.q}"
            )


def rotate_param(t: ParamPoint, rotation: np.ndarray) -> ParamPoint:
    """Apply an orthogonal rotation: ``A -> A R^T`` and each center ``f -> R f``."""
    r = np.asarray(rotation, dtype=float)
    return ParamPoint(loading=Loading(t.loading.values @ r.T),
                      centroids=Centroids(t.centroids.values @ r.T))


def frobenius_distance(A1: Loading, A2: Loading) -> float:
    """``||A1 - A2||_F``."""
    if (A1.p, A1.q) != (A2.p, A2.q):
        raise ValueError(
            f"loadings have different shapes: {(A1.p, A1.q)} vs {(A2.p, A2.q)}"
        )
    return float(np.linalg.norm(A1.values - A2.values))


def hausdorff_distance(F1: Centroids, F2: Centroids) -> float:
    """Directed Hausdorff distance ``max_{a in F1} min_{b in F2} ||a - b||``.

    Note the asymmetry: only F1 plays the max side.  See
    :func:`symmetric_hausdorff_distance` for the symmetrized variant.
    """
    if F1.q != F2.q:
        raise ValueError(f"centroid sets have different q: {F1.q} vs {F2.q}")
    diff = F1.values[:, None, :] - F2.values[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    return float(np.sqrt(d2.min(axis=1).max()))


def symmetric_hausdorff_distance(F1: Centroids, F2: Centroids) -> float:
    """``max`` of the two directed Hausdorff distances."""
    return max(hausdorff_distance(F1, F2), hausdorff_distance(F2, F1))


def product_distance(t1: ParamPoint, t2: ParamPoint) -> float:
    """``sqrt(d_F^2 + d_H^2)`` with t1's centroids on the directed max side."""
    d_f = frobenius_distance(t1.loading, t2.loading)
    d_h = hausdorff_distance(t1.centroids, t2.centroids)
    return float(np.hypot(d_f, d_h))


def aligned_distance(t1: ParamPoint, t2: ParamPoint) -> float:
    """Product distance after rotating ``t1`` to best match ``t2``'s loading.

    The rotation comes from the orthogonal Procrustes problem on the
    loadings; both that rotation and the identity are evaluated (all of
    {+1, -1} when q = 1, where the orbit is finite) and the smallest product
    distance is returned.  The value is an upper bound on the true minimum
    over the rotation orbit and is zero whenever the two points are exact
    rotations of each other.
    """
    q = t1.loading.q
    if q == 1:
        candidates = [np.array([[1.0]]), np.array([[-1.0]])]
    else:
        best_r = procrustes_rotation(t2.loading, t1.loading)
        candidates = [best_r, np.eye(q)]
    return min(product_distance(rotate_param(t1, r), t2) for r in candidates)


def adjusted_rand_index(a: Membership, b: Membership) -> float:
    """Adjusted Rand index between two labelings of the same objects.

    Lies in [-1, 1]; equals 1 exactly when the partitions coincide up to a
    relabeling.  Degenerate pairs where the index is 0/0 (both partitions
    all-singletons or both single-cluster) score 1 by convention.
    """
    if a.n != b.n:
        raise ValueError(f"labelings have different lengths: {a.n} vs {b.n}")
    n = a.n
    contingency = np.zeros((a.k_max, b.k_max), dtype=np.int64)
    np.add.at(contingency, (a.labels - 1, b.labels - 1), 1)

    def _pairs(counts):
        counts = counts.astype(np.float64)
        return float((counts * (counts - 1) / 2.0).sum())

    same_both = _pairs(contingency.ravel())
    same_a = _pairs(contingency.sum(axis=1))
    same_b = _pairs(contingency.sum(axis=0))
    total = n * (n - 1) / 2.0
    expected = same_a * same_b / total if total > 0 else 0.0
    maximum = 0.5 * (same_a + same_b)
    if maximum == expected:
        return 1.0
    return float((same_both - expected) / (maximum - expected))
