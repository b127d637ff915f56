import numpy as np
import pytest

from fkmeans import (Loading, orthonormalize, procrustes_rotation,
                     random_loading, sym_eig)
from conftest import random_frame, random_orthogonal

# Critical value of chi-square with 7 degrees of freedom at p = 0.01.
CHI2_7_CRIT_01 = 18.4753


class TestSymEig:
    def test_identity(self):
        res = sym_eig(np.eye(3))
        assert np.allclose(res.eigenvalues, [1.0, 1.0, 1.0])
        assert np.allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(3), atol=1e-12)

    def test_diagonal(self):
        res = sym_eig(np.diag([3.0, 1.0]))
        assert np.allclose(res.eigenvalues, [3.0, 1.0])
        # Sign rule forces the leading nonzero component positive.
        assert np.allclose(np.abs(res.eigenvectors), np.eye(2), atol=1e-14)
        assert res.eigenvectors[0, 0] > 0 and res.eigenvectors[1, 1] > 0

    def test_reconstruction_and_trace(self, rng):
        for _ in range(10):
            m = rng.standard_normal((6, 6))
            s = m + m.T
            res = sym_eig(s)
            recon = res.eigenvectors @ np.diag(res.eigenvalues) @ res.eigenvectors.T
            assert np.linalg.norm(recon - s) <= 1e-8 * max(1.0, np.linalg.norm(s))
            assert res.eigenvalues.sum() == pytest.approx(np.trace(s), rel=1e-8)
            assert (res.eigenvalues ** 2).sum() == pytest.approx(
                np.linalg.norm(s) ** 2, rel=1e-8)
            assert np.all(np.diff(res.eigenvalues) <= 1e-12)
            assert np.allclose(res.eigenvectors.T @ res.eigenvectors, np.eye(6),
                               atol=1e-9)

    def test_eigenpairs_satisfy_definition(self, rng):
        m = rng.standard_normal((5, 5))
        s = m + m.T
        res = sym_eig(s)
        for i in range(5):
            lhs = s @ res.eigenvectors[:, i]
            rhs = res.eigenvalues[i] * res.eigenvectors[:, i]
            assert np.linalg.norm(lhs - rhs) <= 1e-8 * np.linalg.norm(s)

    def test_deterministic(self, rng):
        m = rng.standard_normal((4, 4))
        s = m + m.T
        a = sym_eig(s)
        b = sym_eig(s.copy())
        assert np.array_equal(a.eigenvalues, b.eigenvalues)
        assert np.array_equal(a.eigenvectors, b.eigenvectors)

    def test_zero_matrix_tie_rule(self):
        res = sym_eig(np.zeros((3, 3)))
        assert np.array_equal(res.eigenvectors, np.eye(3))

    def test_rejects_bad_input(self, rng):
        with pytest.raises(ValueError):
            sym_eig(rng.standard_normal((4, 4)) + np.triu(np.ones((4, 4))))
        with pytest.raises(ValueError):
            sym_eig(np.array([[1.0, np.inf], [np.inf, 1.0]]))
        with pytest.raises(ValueError):
            sym_eig(np.ones((2, 3)))


class TestOrthonormalize:
    def test_idempotent_on_orthonormal(self, rng):
        base = random_frame(rng, 6, 3)
        out = orthonormalize(base)
        assert np.linalg.norm(out.values - base) <= 1e-12

    def test_scaling_removed(self):
        out = orthonormalize(np.array([[2.0, 0.0], [0.0, 3.0], [0.0, 0.0]]))
        assert np.allclose(out.values, np.eye(3)[:, :2], atol=1e-14)

    def test_gram_identity(self, rng):
        out = orthonormalize(rng.standard_normal((8, 3)))
        assert np.linalg.norm(out.values.T @ out.values - np.eye(3)) <= 1e-10

    def test_preserves_span(self, rng):
        m = rng.standard_normal((7, 3))
        out = orthonormalize(m)
        # Projecting the original columns onto the basis must reproduce them.
        proj = out.values @ (out.values.T @ m)
        assert np.allclose(proj, m, atol=1e-10)

    def test_rank_deficient_rejected(self, rng):
        col = rng.standard_normal((5, 1))
        with pytest.raises(ValueError):
            orthonormalize(np.hstack([col, 2.0 * col]))


class TestRandomLoading:
    def test_deterministic_per_seed(self):
        a = random_loading(3, 1, seed=7)
        b = random_loading(3, 1, seed=7)
        assert np.array_equal(a.values, b.values)
        c = random_loading(3, 1, seed=8)
        assert not np.array_equal(a.values, c.values)

    def test_orthonormal_invariant(self, rng):
        for seed in range(20):
            p = int(rng.integers(2, 10))
            q = int(rng.integers(1, p))
            a = random_loading(p, q, seed=seed)
            assert np.linalg.norm(a.values.T @ a.values - np.eye(q)) <= 1e-10

    def test_rejects_bad_dims(self):
        with pytest.raises(ValueError):
            random_loading(3, 3, seed=0)
        with pytest.raises(ValueError):
            random_loading(2, 0, seed=0)

    def test_direction_uniform_on_sphere(self):
        # Octant occupancy of the q=1 column over 10k draws: under uniformity
        # each sign pattern of the 3 coordinates is equally likely.
        draws = 10_000
        counts = np.zeros(8)
        for seed in range(draws):
            v = random_loading(3, 1, seed=seed).values[:, 0]
            octant = (v[0] > 0) * 4 + (v[1] > 0) * 2 + (v[2] > 0)
            counts[octant] += 1
        expected = draws / 8.0
        chi2 = ((counts - expected) ** 2 / expected).sum()
        assert chi2 < CHI2_7_CRIT_01


def _procrustes_objective(a1, a2, r):
    return np.linalg.norm(a1 - a2 @ r.T)


class TestProcrustes:
    def test_identity_on_equal(self, rng):
        a = Loading(random_frame(rng, 5, 2))
        r = procrustes_rotation(a, a)
        assert np.allclose(r, np.eye(2), atol=1e-12)

    def test_recovers_known_rotation(self, rng):
        for _ in range(10):
            a1 = random_frame(rng, 6, 3)
            rot = random_orthogonal(rng, 3)
            a2 = a1 @ rot
            r = procrustes_rotation(Loading(a1), Loading(a2))
            assert np.allclose(r, rot, atol=1e-8)
            assert _procrustes_objective(a1, a2, r) <= 1e-8
            assert np.allclose(r @ r.T, np.eye(3), atol=1e-9)

    def test_beats_random_rotations(self, rng):
        a1 = random_frame(rng, 7, 3)
        a2 = random_frame(rng, 7, 3)
        r = procrustes_rotation(Loading(a1), Loading(a2))
        best = _procrustes_objective(a1, a2, r)
        assert best <= np.linalg.norm(a1 - a2) + 1e-12  # identity is feasible
        for _ in range(1000):
            cand = random_orthogonal(rng, 3)
            assert best <= _procrustes_objective(a1, a2, cand) + 1e-10

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            procrustes_rotation(Loading(random_frame(rng, 5, 2)),
                                Loading(random_frame(rng, 5, 3)))
