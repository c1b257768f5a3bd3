"""Resampling, MDF, α ve QuickBundles için oracle ve özellik testleri."""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from errors import DegenerateInputError, ParameterError
from fiberset_io import Fiber
from geometry_kernels import (
    ResampledFiber,
    alpha_metric,
    mdf_distance,
    pairwise_mdf,
    quickbundles,
    resample,
)


def brute_mdf(a, b):
    n = len(a)
    direct = sum(np.linalg.norm(a[k] - b[k]) for k in range(n)) / n
    flipped = sum(np.linalg.norm(a[k] - b[n - 1 - k]) for k in range(n)) / n
    return min(direct, flipped)


def random_fiber(rng, fid=0, n=25):
    return ResampledFiber(fid, np.cumsum(rng.normal(size=(n, 3)), axis=0))


def straight_fiber(fid=0, n=25):
    return ResampledFiber(fid, np.column_stack([np.zeros(n), np.arange(float(n)), np.zeros(n)]))


class TestResample:
    def test_straight_segment(self):
        out = resample(Fiber(0, [[0, 0, 0], [1, 0, 0]]), 3)
        np.testing.assert_allclose(out.points, [[0, 0, 0], [0.5, 0, 0], [1, 0, 0]], atol=1e-12)

    def test_uniform_input_is_identity(self):
        pts = np.column_stack([np.arange(6.0), np.zeros(6), np.zeros(6)])
        np.testing.assert_allclose(resample(Fiber(0, pts), 6).points, pts, atol=1e-9)

    def test_l_shape_unit_arc_steps(self):
        out = resample(Fiber(0, [[0, 0, 0], [3, 0, 0], [3, 4, 0]]), 8).points
        expected = [[k, 0, 0] if k <= 3 else [3, k - 3, 0] for k in range(8)]
        np.testing.assert_allclose(out, expected, atol=1e-9)

    def test_endpoints_preserved(self, rng):
        pts = np.cumsum(rng.normal(size=(17, 3)), axis=0)
        out = resample(Fiber(3, pts), 25)
        assert out.n_points == 25 and out.id == 3
        np.testing.assert_array_equal(out.points[0], pts[0])
        np.testing.assert_array_equal(out.points[-1], pts[-1])

    def test_zero_length_fiber(self):
        with pytest.raises(DegenerateInputError):
            resample(Fiber(0, [[1, 1, 1], [1, 1, 1], [1, 1, 1]]), 5)

    def test_too_few_points_requested(self):
        with pytest.raises(ParameterError):
            resample(Fiber(0, [[0, 0, 0], [1, 0, 0]]), 1)


class TestMDF:
    def test_identity_and_flip(self, rng):
        a = random_fiber(rng)
        assert mdf_distance(a, a) == 0.0
        assert mdf_distance(a, a.reversed()) == 0.0

    def test_translation(self):
        a = straight_fiber()
        b = ResampledFiber(1, a.points + [3.0, 0.0, 0.0])
        assert mdf_distance(a, b) == pytest.approx(3.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_double_loop(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_fiber(rng), random_fiber(rng, 1)
        assert mdf_distance(a, b) == pytest.approx(brute_mdf(a.points, b.points), abs=1e-9)

    @pytest.mark.parametrize("seed", range(200))
    def test_symmetric_and_rigid_invariant(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 12))
        a, b = random_fiber(rng, n=n), random_fiber(rng, 1, n=n)
        rot = Rotation.random(random_state=seed).as_matrix()
        shift = rng.normal(size=3) * 10
        ra = ResampledFiber(0, a.points @ rot.T + shift)
        rb = ResampledFiber(1, b.points @ rot.T + shift)
        assert mdf_distance(a, b) == pytest.approx(mdf_distance(b, a), abs=1e-12)
        assert mdf_distance(ra, rb) == pytest.approx(mdf_distance(a, b), abs=1e-9)

    def test_point_count_mismatch(self, rng):
        with pytest.raises(ParameterError):
            mdf_distance(random_fiber(rng, n=10), random_fiber(rng, n=12))


class TestPairwise:
    def test_single_fiber(self, rng):
        np.testing.assert_array_equal(pairwise_mdf([random_fiber(rng)]), [[0.0]])

    def test_duplicates_have_zero_distance(self, rng):
        a, b = random_fiber(rng, 0), random_fiber(rng, 1)
        m = pairwise_mdf([a, b, a])
        assert m[0, 2] == 0.0 and m[2, 0] == 0.0

    def test_matches_elementwise_calls(self, rng):
        fibers = [random_fiber(rng, i) for i in range(40)]
        m = pairwise_mdf(fibers)
        np.testing.assert_array_equal(m, m.T)
        np.testing.assert_array_equal(np.diag(m), 0.0)
        for i in range(40):
            for j in range(i + 1, 40):
                assert m[i, j] == pytest.approx(mdf_distance(fibers[i], fibers[j]), abs=1e-12)


class TestAlpha:
    def test_singleton_is_zero(self, rng):
        assert alpha_metric([random_fiber(rng)]) == 0.0

    def test_empty_cluster(self):
        with pytest.raises(ParameterError):
            alpha_metric([])

    def test_two_fibers(self):
        a = straight_fiber()
        b = ResampledFiber(1, a.points + [4.0, 0.0, 0.0])
        assert alpha_metric([a, b]) == pytest.approx(4.0, abs=1e-12)

    def test_five_fibers_mean_of_ten_pairs(self, rng):
        fibers = [random_fiber(rng, i) for i in range(5)]
        pairs = [brute_mdf(fibers[i].points, fibers[j].points) for i in range(5) for j in range(i + 1, 5)]
        assert len(pairs) == 10
        assert alpha_metric(fibers) == pytest.approx(np.mean(pairs), abs=1e-9)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_mean_pairwise_oracle(self, seed):
        rng = np.random.default_rng(seed)
        m, n = int(rng.integers(2, 7)), int(rng.integers(2, 15))
        fibers = [random_fiber(rng, i, n=n) for i in range(m)]
        pairs = [brute_mdf(fibers[i].points, fibers[j].points) for i in range(m) for j in range(i + 1, m)]
        assert alpha_metric(fibers) == pytest.approx(np.mean(pairs), abs=1e-9)

    def test_order_invariant(self, rng):
        fibers = [random_fiber(rng, i) for i in range(6)]
        assert alpha_metric(fibers) == pytest.approx(alpha_metric(fibers[::-1]), abs=1e-12)


class TestQuickBundles:
    def test_identical_fibers_one_cluster(self, rng):
        a = random_fiber(rng)
        model = quickbundles([ResampledFiber(i, a.points) for i in range(5)], threshold=1.0)
        assert model.n_clusters == 1
        assert model.member_ids == ((0, 1, 2, 3, 4),)

    def test_two_separated_groups(self, rng):
        base = random_fiber(rng).points
        fibers = []
        for i in range(20):
            offset = [0.0, 50.0, 0.0] if i % 2 else [0.0, 0.0, 0.0]
            pts = base + offset + rng.normal(scale=0.1, size=base.shape)
            fibers.append(ResampledFiber(i, pts if i % 3 else pts[::-1]))
        model = quickbundles(fibers, threshold=5.0)
        assert model.n_clusters == 2
        labels = model.labels(range(20))
        assert len(set(labels[::2])) == 1 and len(set(labels[1::2])) == 1
        assert labels[0] != labels[1]

    def test_low_threshold_one_cluster_per_fiber(self, rng):
        fibers = [random_fiber(rng, i) for i in range(6)]
        assert quickbundles(fibers, threshold=1e-6).n_clusters == 6

    def test_every_fiber_in_exactly_one_cluster(self, rng):
        fibers = [random_fiber(rng, i) for i in range(30)]
        model = quickbundles(fibers, threshold=8.0)
        members = [fid for group in model.member_ids for fid in group]
        assert sorted(members) == list(range(30))
        for centroid, group in zip(model.centroids, model.member_ids):
            for fid in group:
                assert np.isfinite(mdf_distance(centroid, fibers[fid]))

    def test_flipped_member_updates_running_mean(self, rng):
        a = random_fiber(rng)
        model = quickbundles([a, ResampledFiber(1, a.points[::-1])], threshold=1.0)
        np.testing.assert_allclose(model.centroids[0].points, a.points, atol=1e-12)

    def test_threshold_must_be_positive(self, rng):
        with pytest.raises(ParameterError):
            quickbundles([random_fiber(rng)], threshold=0.0)

    def test_unknown_fiber_label(self, rng):
        model = quickbundles([random_fiber(rng, 0)], threshold=1.0)
        with pytest.raises(ParameterError):
            model.labels([0, 9])
