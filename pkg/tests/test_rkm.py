import itertools

import numpy as np
import pytest

from fkmeans import (Centroids, DataMatrix, Loading, Membership, RkmConfig,
                     rkm_assign, rkm_decomposition_check, rkm_fit,
                     rkm_objective, rkm_update)
from fkmeans.linalg import _eigh_desc
from conftest import random_frame


def reconstruction_error(x, a, f, labels0):
    return float(((x - f[labels0] @ a.T) ** 2).sum())


def rkm_partition_optimum(x, q, labels0, k):
    counts = np.bincount(labels0, minlength=k)
    means = np.vstack([x[labels0 == j].mean(axis=0) for j in range(k)])
    between = (means * counts[:, None]).T @ means
    _, vectors = _eigh_desc(between)
    a = vectors[:, :q]
    f = means @ a
    return a, f, reconstruction_error(x, a, f, labels0) / x.shape[0]


def brute_force_rkm(x, q, k):
    n = x.shape[0]
    best = np.inf
    for assignment in itertools.product(range(k), repeat=n):
        if len(set(assignment)) != k:
            continue
        best = min(best, rkm_partition_optimum(x, q, np.array(assignment), k)[2])
    return best


class TestAssign:
    def test_single_cluster(self, rng):
        X = DataMatrix(rng.standard_normal((5, 4)))
        A = Loading(random_frame(rng, 4, 2))
        F = Centroids(rng.standard_normal((1, 2)))
        assert np.all(rkm_assign(X, A, F).labels == 1)

    def test_exact_match_wins(self, rng):
        a = random_frame(rng, 4, 2)
        f = rng.standard_normal((3, 2))
        X = DataMatrix((f[1] @ a.T).reshape(1, -1))
        assert rkm_assign(X, Loading(a), Centroids(f)).labels[0] == 2

    def test_hand_example(self):
        X = DataMatrix([[1.0, 1.0], [-1.0, 1.0]])
        A = Loading([[1.0], [0.0]])
        F = Centroids([[1.0], [-1.0]])
        assert rkm_assign(X, A, F).labels.tolist() == [1, 2]


class TestUpdate:
    def test_exact_model_zero_error(self, rng):
        a = random_frame(rng, 5, 2)
        f = rng.standard_normal((3, 2)) * 4
        labels0 = np.array([0, 1, 2, 0, 1, 2, 0, 1, 2])
        x = f[labels0] @ a.T
        A, F = rkm_update(DataMatrix(x), Membership(labels0 + 1), q=2)
        assert reconstruction_error(x, A.values, F.values, labels0) <= 1e-20

    def test_k1_closed_form(self, rng):
        x = rng.standard_normal((20, 4)) + 3.0
        A, F = rkm_update(DataMatrix(x), Membership(np.ones(20, dtype=int)), q=1)
        mean = x.mean(axis=0)
        direction = mean / np.linalg.norm(mean)
        assert min(np.linalg.norm(A.values[:, 0] - direction),
                   np.linalg.norm(A.values[:, 0] + direction)) <= 1e-10
        assert F.values[0, 0] == pytest.approx(float(mean @ A.values[:, 0]), rel=1e-12)

    def test_beats_random_candidates(self, rng):
        x = rng.standard_normal((10, 4))
        labels0 = np.array([0, 1, 2, 0, 1, 2, 0, 1, 2, 0])
        A, F = rkm_update(DataMatrix(x), Membership(labels0 + 1), q=2)
        best = reconstruction_error(x, A.values, F.values, labels0)
        for _ in range(1000):
            a = random_frame(rng, 4, 2)
            f = rng.standard_normal((3, 2))
            assert best <= reconstruction_error(x, a, f, labels0) + 1e-9


class TestFit:
    def test_noise_free_model(self, rng):
        a = random_frame(rng, 6, 2)
        f = rng.standard_normal((3, 2)) * 5
        labels0 = np.tile([0, 1, 2], 10)
        x = f[labels0] @ a.T
        res = rkm_fit(DataMatrix(x), RkmConfig(k=3, q=2, restarts=20, seed=0))
        assert res.loss <= 1e-18

    def test_loss_matches_objective(self, rng):
        x = rng.standard_normal((30, 5))
        res = rkm_fit(DataMatrix(x), RkmConfig(k=3, q=2, restarts=5, seed=1))
        centered = DataMatrix(x - x.mean(axis=0))
        assert res.loss == pytest.approx(
            rkm_objective(centered, res.loading, res.centroids), rel=1e-9)

    def test_decomposition_identity_along_iterates(self, rng):
        x = rng.standard_normal((24, 5))
        X = DataMatrix(x)
        xc = x - x.mean(axis=0)
        checks = []

        def hook(a, f, labels, obj, iteration):
            total, pca_term, fkm_term = rkm_decomposition_check(
                DataMatrix(xc), Loading(a), Centroids(f), Membership(labels))
            checks.append(abs(total - pca_term - fkm_term) <= 1e-8 * (1.0 + total))

        rkm_fit(X, RkmConfig(k=3, q=2, restarts=4, seed=2), on_iterate=hook)
        assert checks and all(checks)

    def test_loss_decomposition_relation(self, rng):
        # Normalized RKM loss at (A, F, U) = pca_term/n + projected term/n.
        x = rng.standard_normal((15, 4))
        a = random_frame(rng, 4, 2)
        f = rng.standard_normal((3, 2))
        labels = np.array([1, 2, 3] * 5)
        total, pca_term, fkm_term = rkm_decomposition_check(
            DataMatrix(x), Loading(a), Centroids(f), Membership(labels))
        labeled_rkm = reconstruction_error(x, a, f, labels - 1)
        assert labeled_rkm == pytest.approx(pca_term + fkm_term, rel=1e-10)
        assert labeled_rkm >= fkm_term - 1e-10  # loss dominates its projected part

    def test_monotone_single_restart(self, rng):
        x = rng.standard_normal((30, 4))
        values = []
        rkm_fit(DataMatrix(x), RkmConfig(k=3, q=2, restarts=1, seed=7),
                on_iterate=lambda a, f, l, o, it: values.append(o))
        assert np.all(np.diff(values) <= 1e-12)

    def test_matches_brute_force_smoke(self):
        hits = 0
        for t in range(20):
            gen = np.random.default_rng(200 + t)
            x = gen.standard_normal((7, 3))
            res = rkm_fit(DataMatrix(x), RkmConfig(k=2, q=1, restarts=50, seed=t,
                                                   center_columns=False))
            if res.loss <= brute_force_rkm(x, 1, 2) + 1e-9:
                hits += 1
        assert hits >= 18

    def test_benchmark_scenario_fails(self):
        # RKM chases total variance, which the wide noise columns dominate.
        from fkmeans import adjusted_rand_index, generate_paper_scenario
        X, truth = generate_paper_scenario(n=300, seed=6)
        res = rkm_fit(X, RkmConfig(k=3, q=2, restarts=50, seed=6))
        assert adjusted_rand_index(res.labels, truth) <= 0.5
