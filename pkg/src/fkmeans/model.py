"""Core data model: matrix types, the power loss family and clustering objectives.

All types are immutable value objects: the wrapped numpy arrays are copied on
construction and marked read-only, so instances can be shared freely between
threads.  Every operation in this module is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Frobenius deviation from ``A^T A = I`` accepted without modification.
ORTHONORMAL_TOL = 1e-10
#: Worst deviation the :class:`Loading` constructor repairs by re-orthonormalization.
REPAIR_TOL = 1e-6


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


def _qr_orthonormal(mat: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``mat``'s column space with a sign convention.

    Signs are chosen so the R factor has a positive diagonal, which makes the
    map idempotent on already-orthonormal input.
    """
    q, r = np.linalg.qr(mat)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass(frozen=True)
class DataMatrix:
    """An ``n x p`` real matrix of observations; rows are objects."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_matrix(self.values, "data matrix"))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Loading:
    """A ``p x q`` column-wise orthonormal projection matrix, ``1 <= q < p``.

    Inputs within ``REPAIR_TOL`` of orthonormality are re-orthonormalized
    (useful when ingesting matrices that round-tripped through text files);
    anything worse is rejected.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.values, "loading matrix")
        p, q = arr.shape
        if not 1 <= q < p:
            raise ValueError(f"loading requires 1 <= q < p, got p={p}, q={q}")
        gram_dev = np.linalg.norm(arr.T @ arr - np.eye(q))
        if gram_dev > ORTHONORMAL_TOL:
            if gram_dev > REPAIR_TOL:
                raise ValueError(
                    f"loading columns are not orthonormal (deviation {gram_dev:.3g})"
                )
            arr = _qr_orthonormal(arr)
            arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Centroids:
    """A ``k x q`` matrix of cluster centers in the reduced space."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_matrix(self.values, "centroid matrix"))

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def q(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Membership:
    """Cluster labels for ``n`` objects, 1-based (labels lie in ``[1, k]``)."""

    labels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.labels)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("membership labels must be a non-empty 1-d array")
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(arr)
            if not np.all(rounded == arr):
                raise ValueError("membership labels must be integers")
            arr = rounded.astype(np.int64)
        else:
            arr = arr.astype(np.int64)
        if arr.min() < 1:
            raise ValueError("membership labels are 1-based and must be >= 1")
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    @property
    def n(self) -> int:
        return self.labels.size

    @property
    def k_max(self) -> int:
        return int(self.labels.max())

    def binary(self, k: int | None = None) -> np.ndarray:
        """The equivalent binary matrix ``U`` with exactly one 1 per row."""
        k = self.k_max if k is None else int(k)
        if k < self.k_max:
            raise ValueError(f"k={k} smaller than largest label {self.k_max}")
        u = np.zeros((self.n, k))
        u[np.arange(self.n), self.labels - 1] = 1.0
        return u

    def counts(self, k: int | None = None) -> np.ndarray:
        k = self.k_max if k is None else int(k)
        return np.bincount(self.labels - 1, minlength=k)


@dataclass(frozen=True)
class LossSpec:
    """The power loss family ``psi(r) = r**exponent`` on ``r >= 0``.

    Every member is continuous, vanishes at zero, is nondecreasing, and
    satisfies the growth bound ``psi(2 r) <= growth_lambda * psi(r)`` with
    ``growth_lambda = 2**exponent``.  The default exponent 2 gives the usual
    squared-norm clustering loss.
    """

    exponent: float = 2.0

    def __post_init__(self):
        if not 1.0 <= float(self.exponent) <= 4.0:
            raise ValueError("loss exponent must lie in [1, 4]")
        object.__setattr__(self, "exponent", float(self.exponent))

    @property
    def growth_lambda(self) -> float:
        return 2.0 ** self.exponent


#: Default squared-norm loss.
SQUARED_LOSS = LossSpec(2.0)


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters plus telemetry from a clustering run.

    ``loss`` always equals the fitting method's objective evaluated at
    ``(loading, centroids, labels)``.
    """

    loading: Loading
    centroids: Centroids
    labels: Membership
    loss: float
    iterations: int
    restarts_used: int
    seed: int


def psi_eval(r, spec: LossSpec = SQUARED_LOSS):
    """Evaluate ``psi(r) = r**s``; raises for negative ``r``."""
    arr = np.asarray(r, dtype=float)
    if np.any(arr < 0):
        raise ValueError("psi is defined on r >= 0")
    out = arr ** spec.exponent
    return float(out) if np.isscalar(r) or arr.ndim == 0 else out


def _sq_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (n, k).

    Uses the expanded form; tiny negative values from rounding are possible
    and harmless for arg-min use.  Exact for small-integer test inputs.
    """
    p_sq = np.einsum("ij,ij->i", points, points)
    c_sq = np.einsum("ij,ij->i", centers, centers)
    return p_sq[:, None] - 2.0 * (points @ centers.T) + c_sq[None, :]


def _check_dims(X: DataMatrix, A: Loading, F: Centroids) -> None:
    if A.p != X.p:
        raise ValueError(f"loading has p={A.p}, data has p={X.p}")
    if F.q != A.q:
        raise ValueError(f"centroids have q={F.q}, loading has q={A.q}")


def _min_sq_residuals(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Exact per-point squared distance to the nearest center (no expansion,
    so perfect fits come out as exact zeros)."""
    best = np.full(points.shape[0], np.inf)
    for j in range(centers.shape[0]):
        diff = points - centers[j]
        np.minimum(best, np.einsum("ij,ij->i", diff, diff), out=best)
    return best


def fkm_objective(X: DataMatrix, A: Loading, F: Centroids,
                  spec: LossSpec = SQUARED_LOSS) -> float:
    """Average projected-space loss ``(1/n) sum_i min_j psi(||A^T x_i - f_j||)``."""
    _check_dims(X, A, F)
    proj = X.values @ A.values
    d2 = _min_sq_residuals(proj, F.values)
    return float(np.mean(d2 ** (spec.exponent / 2.0)))


def rkm_objective(X: DataMatrix, A: Loading, F: Centroids) -> float:
    """Average full-space reconstruction loss ``(1/n) sum_i min_j ||x_i - A f_j||^2``."""
    _check_dims(X, A, F)
    return float(np.mean(_min_sq_residuals(X.values, F.values @ A.values.T)))


def rkm_decomposition_check(X: DataMatrix, A: Loading, F: Centroids,
                            U: Membership) -> tuple[float, float, float]:
    """Split the squared reconstruction error into its PCA and projected parts.

    Returns ``(total, pca_term, fkm_term)`` with ``total = ||X - U F A^T||_F^2``,
    ``pca_term = ||X - X A A^T||_F^2`` and ``fkm_term = ||X A - U F||_F^2``;
    the three satisfy ``total = pca_term + fkm_term`` exactly.
    """
    _check_dims(X, A, F)
    if U.n != X.n:
        raise ValueError(f"membership covers {U.n} objects, data has {X.n}")
    if U.k_max > F.k:
        raise ValueError(f"membership uses label {U.k_max}, only {F.k} centroids")
    x = X.values
    proj = x @ A.values
    assigned = F.values[U.labels - 1]
    total = float(np.sum((x - assigned @ A.values.T) ** 2))
    pca_term = float(np.sum((x - proj @ A.values.T) ** 2))
    fkm_term = float(np.sum((proj - assigned) ** 2))
    return total, pca_term, fkm_term
