"""Plain k-means (Lloyd's algorithm) with seeded multi-start.

Used standalone, as the second stage of tandem clustering, and as the
assignment backbone shared by the subspace fitters: the tie rule (lowest
cluster index wins) and the empty-cluster repair (reseed at the point
farthest from its assigned center) are identical across all of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Centroids, Membership, _sq_distances
from .rng import derive_seed

_TINY = 1e-300

INIT_METHODS = ("plusplus", "random_partition")


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iter: int = 500
    tol: float = 1e-10
    restarts: int = 50
    init: str = "plusplus"
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.init not in INIT_METHODS:
            raise ValueError(f"init must be one of {INIT_METHODS}")


def _reseed_empty(points: np.ndarray, labels: np.ndarray,
                  dist_assigned: np.ndarray, k: int) -> np.ndarray:
    """Move the worst-fit point of a multi-member cluster into each empty cluster.

    ``dist_assigned`` holds each point's squared distance to its current
    center and is updated in place; returns the repaired labels.
    """
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        movable = counts[labels] > 1
        if not movable.any():
            raise ValueError("cannot repair empty cluster: n < k")
        cand = np.flatnonzero(movable)
        i = cand[np.argmax(dist_assigned[cand])]
        counts[labels[i]] -= 1
        counts[j] += 1
        labels[i] = j
        dist_assigned[i] = 0.0
    return labels


def _balanced_partition(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """Random partition with cluster sizes differing by at most one."""
    labels = np.empty(n, dtype=np.int64)
    labels[rng.permutation(n)] = np.arange(n) % k
    return labels


def _plusplus_centers(rng, points: np.ndarray, k: int) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = points[idx]
        np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1), out=d2)
    return centers


def _group_means(points: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    means = np.empty((k, points.shape[1]))
    for j in range(k):
        means[j] = points[labels == j].mean(axis=0)
    return means


def _lloyd(points: np.ndarray, k: int, init: str, rng, max_iter: int,
           tol: float, on_iterate=None) -> tuple[np.ndarray, np.ndarray, float, int]:
    n = points.shape[0]
    if init == "plusplus":
        centers = _plusplus_centers(rng, points, k)
    else:
        centers = _group_means(points, _balanced_partition(rng, n, k), k)
    prev = np.inf
    labels = np.zeros(n, dtype=np.int64)
    iterations = 0
    for it in range(1, max_iter + 1):
        d2 = _sq_distances(points, centers)
        labels = d2.argmin(axis=1)
        dmin = np.clip(d2[np.arange(n), labels], 0.0, None)
        labels = _reseed_empty(points, labels, dmin, k)
        centers = _group_means(points, labels, k)
        loss = float(((points - centers[labels]) ** 2).sum() / n)
        if on_iterate is not None:
            on_iterate(centers, labels + 1, loss)
        iterations = it
        if prev - loss < tol * max(prev, _TINY):
            prev = loss
            break
        prev = loss
    return centers, labels, prev, iterations


def _kmeans_best(points: np.ndarray, cfg: KMeansConfig):
    """Best Lloyd run over ``cfg.restarts`` seeded starts.

    Returns raw ``(centers, labels, loss, iterations)``; selection is by
    lowest loss, ties broken by lowest restart index.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if not np.all(np.isfinite(points)):
        raise ValueError("k-means input contains non-finite entries")
    n = points.shape[0]
    if n < cfg.k:
        raise ValueError(f"need at least k={cfg.k} points, got n={n}")
    best = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng(derive_seed(cfg.seed, r))
        run = _lloyd(points, cfg.k, cfg.init, rng, cfg.max_iter, cfg.tol)
        if best is None or run[2] < best[2]:
            best = run
    return best


def kmeans_fit(points: np.ndarray, cfg: KMeansConfig) -> tuple[Centroids, Membership, float]:
    """Fit k-means to an ``n x q`` matrix; returns centroids, labels and the
    normalized loss ``(1/n) sum_i min_j ||y_i - f_j||^2``."""
    centers, labels, loss, _ = _kmeans_best(points, cfg)
    return Centroids(centers), Membership(labels + 1), loss
