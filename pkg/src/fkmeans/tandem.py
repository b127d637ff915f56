"""Tandem clustering: PCA first, then k-means on the leading principal scores.

This is the two-step procedure the subspace methods are meant to replace;
when the cluster structure lives in low-variance directions the leading
components miss it entirely.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .kmeans import KMeansConfig, _kmeans_best
from .linalg import sym_eig
from .model import Centroids, DataMatrix, FitResult, Loading, Membership


def pca(X: DataMatrix, q: int) -> tuple[Loading, np.ndarray]:
    """Top-q principal axes and scores.

    Columns are centered internally; the covariance uses denominator ``n``.
    Returns ``(loading, scores)`` with ``scores = X_centered @ loading``.
    """
    if not 1 <= q < X.p:
        raise ValueError(f"pca requires 1 <= q < p, got q={q}, p={X.p}")
    centered = X.values - X.values.mean(axis=0)
    cov = centered.T @ centered / X.n
    decomp = sym_eig(cov)
    loading = Loading(decomp.eigenvectors[:, :q])
    return loading, centered @ loading.values


def tandem_fit(X: DataMatrix, k: int, q: int, cfg: KMeansConfig) -> FitResult:
    """PCA to ``q`` dimensions, then k-means on the scores.

    ``k`` overrides ``cfg.k``; the reported loss is the k-means loss in
    score space.
    """
    loading, scores = pca(X, q)
    centers, labels, loss, iterations = _kmeans_best(scores, replace(cfg, k=k))
    return FitResult(loading=loading, centroids=Centroids(centers),
                     labels=Membership(labels + 1), loss=loss,
                     iterations=iterations, restarts_used=cfg.restarts,
                     seed=cfg.seed)
