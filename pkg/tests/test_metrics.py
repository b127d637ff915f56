import numpy as np
import pytest

from fkmeans import (Centroids, Loading, Membership, ParamPoint,
                     adjusted_rand_index, aligned_distance, frobenius_distance,
                     hausdorff_distance, product_distance, rotate_param,
                     symmetric_hausdorff_distance)
from conftest import random_frame, random_orthogonal


def brute_directed_hausdorff(f1, f2):
    return max(min(float(np.linalg.norm(a - b)) for b in f2) for a in f1)


def brute_ari(a, b):
    """Pair-counting definition of the adjusted Rand index."""
    n = len(a)
    ss = sd = ds = dd = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_a = a[i] == a[j]
            same_b = b[i] == b[j]
            ss += same_a and same_b
            sd += same_a and not same_b
            ds += same_b and not same_a
            dd += not same_a and not same_b
    total = ss + sd + ds + dd
    expected = (ss + sd) * (ss + ds) / total
    maximum = 0.5 * ((ss + sd) + (ss + ds))
    if maximum == expected:
        return 1.0
    return (ss - expected) / (maximum - expected)


def random_param(rng, p=5, q=2, k=3):
    return ParamPoint(Loading(random_frame(rng, p, q)),
                      Centroids(rng.standard_normal((k, q)) * 2))


class TestFrobenius:
    def test_zero_on_equal(self, rng):
        a = Loading(random_frame(rng, 4, 2))
        assert frobenius_distance(a, a) == 0.0

    def test_orthogonal_unit_columns(self):
        e1 = Loading([[1.0], [0.0]])
        e2 = Loading([[0.0], [1.0]])
        assert frobenius_distance(e1, e2) == pytest.approx(np.sqrt(2), rel=1e-12)

    def test_entrywise_oracle(self, rng):
        a1, a2 = random_frame(rng, 6, 3), random_frame(rng, 6, 3)
        want = np.sqrt(((a1 - a2) ** 2).sum())
        assert frobenius_distance(Loading(a1), Loading(a2)) == pytest.approx(want, rel=1e-12)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ValueError):
            frobenius_distance(Loading(random_frame(rng, 4, 2)),
                               Loading(random_frame(rng, 5, 2)))


class TestHausdorff:
    def test_zero_on_equal(self, rng):
        f = Centroids(rng.standard_normal((4, 2)))
        assert hausdorff_distance(f, f) == 0.0

    def test_directed_asymmetry(self):
        f1 = Centroids([[0.0]])
        f2 = Centroids([[0.0], [100.0]])
        assert hausdorff_distance(f1, f2) == 0.0
        assert hausdorff_distance(f2, f1) == 100.0
        assert symmetric_hausdorff_distance(f1, f2) == 100.0

    def test_hand_example(self):
        f1 = Centroids([[0.0], [3.0]])
        f2 = Centroids([[1.0]])
        assert hausdorff_distance(f1, f2) == pytest.approx(2.0, rel=1e-12)

    def test_brute_force_oracle(self, rng):
        for _ in range(50):
            f1 = rng.standard_normal((int(rng.integers(1, 6)), 3))
            f2 = rng.standard_normal((int(rng.integers(1, 6)), 3))
            got = hausdorff_distance(Centroids(f1), Centroids(f2))
            assert got == pytest.approx(brute_directed_hausdorff(f1, f2), abs=1e-12)

    def test_zero_iff_rows_contained(self, rng):
        f2 = rng.standard_normal((4, 2))
        f1 = f2[[2, 0]]
        assert hausdorff_distance(Centroids(f1), Centroids(f2)) <= 1e-12
        f1_off = f1 + 0.5
        assert hausdorff_distance(Centroids(f1_off), Centroids(f2)) > 1e-6


class TestProduct:
    def test_zero_on_identical(self, rng):
        t = random_param(rng)
        assert product_distance(t, t) == 0.0

    def test_three_four_five(self):
        # Loadings engineered so d_F = 3 exactly; centers 4 apart gives d_H = 4.
        a1 = np.zeros((7, 3))
        a1[0, 0] = a1[1, 1] = a1[2, 2] = 1.0
        a2 = np.zeros((7, 3))
        a2[0, 0] = -1.0
        a2[1, 1] = -1.0
        a2[2, 2] = 0.5
        a2[3, 2] = np.sqrt(3) / 2
        t1 = ParamPoint(Loading(a1), Centroids([[0.0, 0.0, 0.0]]))
        t2 = ParamPoint(Loading(a2), Centroids([[4.0, 0.0, 0.0]]))
        assert frobenius_distance(t1.loading, t2.loading) == pytest.approx(3.0, rel=1e-12)
        assert product_distance(t1, t2) == pytest.approx(5.0, rel=1e-12)

    def test_recomposition(self, rng):
        t1, t2 = random_param(rng), random_param(rng)
        d_f = frobenius_distance(t1.loading, t2.loading)
        d_h = hausdorff_distance(t1.centroids, t2.centroids)
        assert product_distance(t1, t2) == pytest.approx(np.hypot(d_f, d_h), rel=1e-12)


class TestAligned:
    def test_zero_on_orbit(self, rng):
        for _ in range(10):
            t = random_param(rng)
            rot = random_orthogonal(rng, 2)
            assert aligned_distance(t, rotate_param(t, rot)) <= 1e-8
            assert aligned_distance(rotate_param(t, rot), t) <= 1e-8

    def test_q1_checks_both_signs(self, rng):
        t = random_param(rng, p=4, q=1, k=2)
        flipped = ParamPoint(Loading(-t.loading.values),
                             Centroids(-t.centroids.values))
        assert aligned_distance(t, flipped) <= 1e-12
        assert product_distance(t, flipped) > 0.1  # unrotated distance is large

    def test_never_exceeds_product(self, rng):
        for _ in range(50):
            t1, t2 = random_param(rng), random_param(rng)
            assert aligned_distance(t1, t2) <= product_distance(t1, t2) + 1e-12

    def test_beats_random_rotations_via_orbit(self, rng):
        # On an exact orbit the aligned distance must beat every random rotation.
        t1 = random_param(rng)
        t2 = rotate_param(t1, random_orthogonal(rng, 2))
        got = aligned_distance(t1, t2)
        for _ in range(1000):
            r = random_orthogonal(rng, 2)
            assert got <= product_distance(rotate_param(t1, r), t2) + 1e-10


class TestAri:
    def test_identical(self):
        m = Membership([1, 1, 2, 3, 3])
        assert adjusted_rand_index(m, m) == 1.0

    def test_relabeling_invariance(self):
        a = Membership([1, 1, 2, 2, 3])
        b = Membership([3, 3, 1, 1, 2])
        assert adjusted_rand_index(a, b) == 1.0

    def test_hand_value(self):
        a = Membership([1, 1, 2, 2])
        b = Membership([1, 2, 1, 2])
        assert adjusted_rand_index(a, b) == pytest.approx(-0.5, rel=1e-12)

    def test_permutation_invariance(self, rng):
        a = rng.integers(1, 4, size=30)
        b = rng.integers(1, 4, size=30)
        perm = {1: 3, 2: 1, 3: 2}
        b_perm = np.array([perm[v] for v in b])
        assert adjusted_rand_index(Membership(a), Membership(b)) == pytest.approx(
            adjusted_rand_index(Membership(a), Membership(b_perm)), rel=1e-12)

    def test_brute_force_oracle(self, rng):
        for _ in range(60):
            n = int(rng.integers(2, 12))
            a = rng.integers(1, 4, size=n)
            b = rng.integers(1, 4, size=n)
            got = adjusted_rand_index(Membership(a), Membership(b))
            assert got == pytest.approx(brute_ari(a.tolist(), b.tolist()), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            adjusted_rand_index(Membership([1, 2]), Membership([1, 2, 1]))
