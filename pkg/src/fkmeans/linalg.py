"""Dense linear-algebra kernel: symmetric eigendecomposition, orthonormal
bases, random orthonormal frames and the orthogonal Procrustes rotation.

The eigensolver is LAPACK's symmetric driver with deterministic
post-processing (descending eigenvalues, sign-normalized eigenvectors,
lexicographic ordering inside exactly-tied eigenvalue groups) so repeated
calls on identical input return identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Loading, _qr_orthonormal

#: Relative symmetry tolerance accepted by :func:`sym_eig`.
SYMMETRY_TOL = 1e-8
#: Singular values below this (relative) threshold mark rank deficiency.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class SymEigResult:
    """Spectral decomposition: eigenvalues descending, column i of
    ``eigenvectors`` paired with ``eigenvalues[i]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector signs so the first non-negligible component is positive."""
    out = vectors.copy()
    for i in range(out.shape[1]):
        col = out[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        anchor = nz[0] if nz.size else 0
        if col[anchor] < 0:
            out[:, i] = -col
    return out


def _eigh_desc(sym: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw descending eigendecomposition with the deterministic conventions.

    Assumes the input is symmetric; used on matrices that are symmetric by
    construction inside the fitting loops.
    """
    w, v = np.linalg.eigh(0.5 * (sym + sym.T))
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _fix_signs(v[:, order])
    # Reorder exactly-tied eigenvalue groups lexicographically (descending).
    start = 0
    m = w.size
    while start < m:
        stop = start + 1
        while stop < m and w[stop] == w[start]:
            stop += 1
        if stop - start > 1:
            cols = sorted(range(start, stop),
                          key=lambda j: tuple(v[:, j]), reverse=True)
            v[:, start:stop] = v[:, cols]
        start = stop
    return w, v


def sym_eig(S: np.ndarray) -> SymEigResult:
    """Full spectral decomposition of a symmetric matrix, eigenvalues descending."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix contains non-finite entries")
    norm = np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > SYMMETRY_TOL * (1.0 + norm):
        raise ValueError("matrix is not symmetric")
    w, v = _eigh_desc(S)
    w.flags.writeable = False
    v.flags.writeable = False
    return SymEigResult(eigenvalues=w, eigenvectors=v)


def orthonormalize(M: np.ndarray) -> Loading:
    """Orthonormal basis of ``M``'s column space as a :class:`Loading`.

    Column order and spans are preserved (no pivoting); rank deficiency is
    detected from the singular values at threshold ``RANK_TOL``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix contains non-finite entries")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= RANK_TOL * max(1.0, sv[0]):
        raise ValueError("matrix is rank deficient; columns do not span q dimensions")
    return Loading(_qr_orthonormal(M))


def _random_frame(rng: np.random.Generator, p: int, q: int) -> np.ndarray:
    """Haar-distributed p x q orthonormal frame (QR of a Gaussian draw)."""
    for _ in range(4):
        m = rng.standard_normal((p, q))
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] > RANK_TOL * max(1.0, sv[0]):
            return _qr_orthonormal(m)
    raise RuntimeError("failed to draw a full-rank Gaussian matrix")


def random_loading(p: int, q: int, seed: int) -> Loading:
    """Seeded random orthonormal loading, uniform over frames."""
    if not 1 <= q < p:
        raise ValueError(f"random loading requires 1 <= q < p, got p={p}, q={q}")
    rng = np.random.default_rng(seed)
    return Loading(_random_frame(rng, p, q))


def procrustes_rotation(A1: Loading, A2: Loading) -> np.ndarray:
    """The orthogonal ``R`` minimizing ``||A1 - A2 R^T||_F``.

    Computed from the singular decomposition of ``A2^T A1``; reflections are
    allowed, so the minimum is over the full orthogonal group.
    """
    if (A1.p, A1.q) != (A2.p, A2.q):
        raise ValueError(
            f"loadings have different shapes: {(A1.p, A1.q)} vs {(A2.p, A2.q)}"
        )
    u, _, vh = np.linalg.svd(A2.values.T @ A1.values)
    return vh.T @ u.T
