"""Reduced k-means: the full-space reconstruction baseline.

RKM minimizes ``(1/n) sum_i min_j ||x_i - A f_j||^2``, which splits into the
PCA reconstruction error plus the factorial k-means term (see
:func:`fkmeans.model.rkm_decomposition_check`), so the fitted subspace is
pulled toward directions of high total variance whether or not they carry
the cluster structure.  Initialization, tie handling, empty-cluster repair
and convergence mirror the FKM fitter so head-to-head comparisons are fair.
"""

from __future__ import annotations

import numpy as np

from .fkm import FkmConfig, IterateHook, _scatter_terms
from .kmeans import _TINY, _plusplus_centers, _reseed_empty
from .linalg import _eigh_desc, _random_frame
from .model import Centroids, DataMatrix, FitResult, Loading, Membership, _check_dims
from .rng import derive_seed


class RkmConfig(FkmConfig):
    """Same fields and defaults as :class:`fkmeans.fkm.FkmConfig`."""


def _full_space_sq_distances(x: np.ndarray, proj: np.ndarray,
                             centers: np.ndarray) -> np.ndarray:
    # ||x - A f||^2 = ||x||^2 - 2 (x^T A) f + ||f||^2 for orthonormal A.
    x_sq = np.einsum("ij,ij->i", x, x)
    f_sq = np.einsum("ij,ij->i", centers, centers)
    return x_sq[:, None] - 2.0 * (proj @ centers.T) + f_sq[None, :]


def rkm_assign(X: DataMatrix, A: Loading, F: Centroids) -> Membership:
    """Nearest reconstructed center ``A f_j`` in the full space; lowest index wins ties."""
    _check_dims(X, A, F)
    proj = X.values @ A.values
    d2 = _full_space_sq_distances(X.values, proj, F.values)
    return Membership(d2.argmin(axis=1) + 1)


def rkm_update(X: DataMatrix, U: Membership, q: int) -> tuple[Loading, Centroids]:
    """Jointly optimal ``(A, F)`` for a fixed partition.

    ``A`` holds the top-q eigenvectors of ``X^T P_U X`` and ``F`` the
    projected cluster means, which minimize ``||X - U F A^T||_F^2`` over
    loadings and centroids.
    """
    if U.n != X.n:
        raise ValueError(f"membership covers {U.n} objects, data has {X.n}")
    if not 1 <= q < X.p:
        raise ValueError(f"update requires 1 <= q < p, got q={q}, p={X.p}")
    _, means, between = _scatter_terms(X.values, U.labels - 1, U.k_max)
    _, vectors = _eigh_desc(between)
    a = vectors[:, :q]
    return Loading(a), Centroids(means @ a)


def _rkm_single(x: np.ndarray, k: int, q: int, seed: int,
                max_iter: int, tol: float, on_iterate: IterateHook | None):
    # Same initialization as the FKM runs (random frame, kmeans++-seeded
    # projected centers) so the head-to-head comparison is fair.
    n = x.shape[0]
    rng = np.random.default_rng(seed)
    a = _random_frame(rng, x.shape[1], q)
    proj = x @ a
    centers = _plusplus_centers(rng, proj, k)
    prev = np.inf
    iterations = 0
    for it in range(1, max_iter + 1):
        d2 = _full_space_sq_distances(x, proj, centers)
        labels = d2.argmin(axis=1)
        dmin = np.clip(d2[np.arange(n), labels], 0.0, None)
        labels = _reseed_empty(x, labels, dmin, k)
        counts, means, between = _scatter_terms(x, labels, k)
        _, vectors = _eigh_desc(between)
        a = vectors[:, :q]
        proj = x @ a
        centers = means @ a
        obj = float(((x - centers[labels] @ a.T) ** 2).sum() / n)
        if on_iterate is not None:
            on_iterate(a, centers, labels + 1, obj, it)
        iterations = it
        if prev - obj < tol * max(prev, _TINY):
            prev = obj
            break
        prev = obj
    labels = _full_space_sq_distances(x, proj, centers).argmin(axis=1)
    loss = float(((x - centers[labels] @ a.T) ** 2).sum() / n)
    return a, centers, labels, loss, iterations


def rkm_fit(X: DataMatrix, cfg: RkmConfig,
            on_iterate: IterateHook | None = None) -> FitResult:
    """Multi-start reduced k-means fit; see :func:`fkmeans.fkm.fkm_fit`."""
    if X.n < cfg.k:
        raise ValueError(f"need at least k={cfg.k} objects, got n={X.n}")
    if cfg.q >= min(X.p, X.n):
        raise ValueError(f"q={cfg.q} must be smaller than min(p, n)={min(X.p, X.n)}")
    x = X.values - X.values.mean(axis=0) if cfg.center_columns else X.values
    best = None
    for r in range(cfg.restarts):
        run = _rkm_single(x, cfg.k, cfg.q, derive_seed(cfg.seed, r),
                          cfg.max_iter, cfg.tol, on_iterate)
        if best is None or run[3] < best[3]:
            best = run
    a, centers, labels, loss, iterations = best
    return FitResult(loading=Loading(a), centroids=Centroids(centers),
                     labels=Membership(labels + 1), loss=loss,
                     iterations=iterations, restarts_used=cfg.restarts,
                     seed=cfg.seed)
