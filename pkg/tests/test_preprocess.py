"""전처리 필터 테스트"""

import numpy as np
import pytest

from src.cloud import Aabb, PointCloud
from src.errors import InsufficientPointsError, ParameterError
from src.preprocess import (
    GROUND_REMOVED_ALL,
    centered_grid_anchor,
    mean_knn_distances,
    pass_through,
    remove_ground,
    statistical_outlier_removal,
    voxel_downsample,
)


def _lattice(n: int, spacing: float, z: float = 0.0, offset=(0.0, 0.0)) -> np.ndarray:
    u, v = np.meshgrid(np.arange(n) * spacing, np.arange(n) * spacing, indexing="ij")
    return np.column_stack([u.ravel() + offset[0], v.ravel() + offset[1], np.full(n * n, z)])


class TestPassThrough:
    def test_inside_and_outside(self):
        cloud = PointCloud(np.array([[0.5, 0.5, 0.5], [2.0, 0.0, 0.0], [1.0, 1.0, 1.0]]))
        box = Aabb((0, 0, 0), (1, 1, 1))

        inside = pass_through(cloud, box)
        outside = pass_through(cloud, box, keep="outside")
        np.testing.assert_array_equal(inside.xyz, [[0.5, 0.5, 0.5], [1.0, 1.0, 1.0]])
        np.testing.assert_array_equal(outside.xyz, [[2.0, 0.0, 0.0]])

    def test_partition(self, rng):
        cloud = PointCloud(rng.uniform(-1, 1, (500, 3)))
        box = Aabb((-0.5, -0.5, -0.5), (0.3, 0.7, 0.2))
        assert len(pass_through(cloud, box)) + len(pass_through(cloud, box, "outside")) == 500

    def test_invalid_keep(self):
        with pytest.raises(ParameterError):
            pass_through(PointCloud.empty(), Aabb((0, 0, 0), (1, 1, 1)), keep="both")


class TestRemoveGround:
    def test_removes_dense_ground_band(self, rng):
        ground = np.column_stack([rng.uniform(0, 5, 10_000), rng.uniform(0, 5, 10_000), rng.uniform(-0.01, 0.01, 10_000)])
        above = np.column_stack([rng.uniform(0, 5, 500), rng.uniform(0, 5, 500), rng.uniform(0.5, 3.0, 500)])
        result = remove_ground(PointCloud(np.vstack([ground, above])), 0.05)

        assert len(result) == 500
        assert result.xyz[:, 2].min() >= 0.5
        assert result.warnings == ()

    def test_flat_ground_only(self, rng):
        xyz = np.column_stack([rng.uniform(0, 1, 300), rng.uniform(0, 1, 300), rng.uniform(0, 0.01, 300)])
        result = remove_ground(PointCloud(xyz), 0.05)
        assert len(result) == 0
        assert GROUND_REMOVED_ALL in result.warnings

    def test_clutter_survives_fine_bin_but_not_coarse_bin(self, rng):
        def band(n, z0, z1):
            return np.column_stack([rng.uniform(0, 4, n), rng.uniform(0, 2, n), rng.uniform(z0, z1, n)])

        xyz = np.vstack([band(5000, 0.0, 0.01), band(300, 0.06, 0.09), band(2000, 0.5, 3.0)])
        xyz[0, 2] = 0.0
        cloud = PointCloud(xyz)

        def clutter_left(result):
            z = result.xyz[:, 2]
            return int(((z >= 0.06) & (z <= 0.09)).sum())

        assert clutter_left(remove_ground(cloud, 0.05)) == 300
        assert clutter_left(remove_ground(cloud, 0.10)) == 0

    def test_invalid_bin(self):
        with pytest.raises(ParameterError):
            remove_ground(PointCloud(np.zeros((2, 3))), -0.1)


def _brute_force_mean_knn(xyz: np.ndarray, k: int) -> np.ndarray:
    dist = np.linalg.norm(xyz[:, None, :] - xyz[None, :, :], axis=2)
    np.fill_diagonal(dist, np.inf)
    return np.sort(dist, axis=1)[:, :k].mean(axis=1)


class TestStatisticalOutlierRemoval:
    def test_far_point_removed(self):
        xyz = np.vstack([_lattice(10, 0.1), [[10.0, 0.0, 0.0]]])
        kept, removed = statistical_outlier_removal(PointCloud(xyz), 5, 1.0)

        np.testing.assert_array_equal(removed.xyz, [[10.0, 0.0, 0.0]])
        assert len(kept) == 100

    def test_equal_spacing_removes_nothing(self):
        xyz = np.column_stack([np.arange(10.0), np.zeros(10), np.zeros(10)])
        kept, removed = statistical_outlier_removal(PointCloud(xyz), 1, 1.0)
        assert len(kept) == 10
        assert len(removed) == 0

    def test_k_too_large(self):
        with pytest.raises(InsufficientPointsError, match="k too large for cloud"):
            statistical_outlier_removal(PointCloud(np.zeros((5, 3))), 5, 1.0)

    def test_mean_knn_matches_brute_force(self, rng):
        xyz = rng.normal(0, 1, (120, 3))
        np.testing.assert_allclose(mean_knn_distances(xyz, 7), _brute_force_mean_knn(xyz, 7), rtol=1e-12)

    def test_matches_brute_force_oracle(self, rng):
        # 가장 큰 경우(1,000점) 포함 50개
        for n in [997] + rng.integers(30, 998, 49).tolist():
            k = int(rng.integers(1, 25))
            ratio = float(rng.uniform(0.5, 2.0))
            xyz = np.vstack([rng.normal(0, 1, (n, 3)), rng.uniform(-8, 8, (3, 3))])

            d = _brute_force_mean_knn(xyz, k)
            expected = d <= d.mean() + ratio * d.std()

            kept, removed = statistical_outlier_removal(PointCloud(xyz), k, ratio)
            np.testing.assert_array_equal(kept.xyz, xyz[expected])
            np.testing.assert_array_equal(removed.xyz, xyz[~expected])

    def test_canonical_order_preserves_small_member(self):
        # 조밀한 평면 + 0.1 m 앞의 작은 타이 격자
        plane = _lattice(200, 0.002)
        tie = _lattice(15, 0.002, z=0.1, offset=(0.2, 0.2))
        cloud = PointCloud(np.vstack([plane, tie]))

        def tie_points(result):
            return int((result.xyz[:, 2] > 0.05).sum())

        kept, _ = statistical_outlier_removal(cloud, 20, 1.0)
        canonical = voxel_downsample(kept, 0.01)
        assert tie_points(canonical) > 0

        reversed_kept, _ = statistical_outlier_removal(voxel_downsample(cloud, 0.01), 20, 1.0)
        assert tie_points(reversed_kept) == 0


class TestVoxelDownsample:
    def test_cube_corners(self):
        corners = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=np.float64)
        merged = voxel_downsample(PointCloud(corners), 2.0)
        np.testing.assert_allclose(merged.xyz, [[0.5, 0.5, 0.5]])

        separate = voxel_downsample(PointCloud(corners), 0.5)
        np.testing.assert_array_equal(separate.xyz, corners)

    def test_tiny_voxels_keep_every_point(self, rng):
        xyz = rng.uniform(0, 1, (300, 3))
        assert len(voxel_downsample(PointCloud(xyz), 1e-7)) == 300

    def test_one_point_per_voxel(self, rng):
        xyz = rng.uniform(0, 1, (5000, 3))
        result = voxel_downsample(PointCloud(xyz), 0.1, anchor=np.zeros(3))
        keys = np.floor(result.xyz / 0.1).astype(int)
        assert len(np.unique(keys, axis=0)) == len(result)
        assert len(result) <= 1000

    def test_idempotent_with_same_anchor(self, rng):
        xyz = rng.uniform(0, 2, (4000, 3))
        anchor = np.array([-0.05, -0.05, -0.05])
        once = voxel_downsample(PointCloud(xyz), 0.1, anchor=anchor)
        twice = voxel_downsample(once, 0.1, anchor=anchor)
        np.testing.assert_array_equal(once.xyz, twice.xyz)

    def test_colors_are_averaged(self):
        cloud = PointCloud(np.array([[0.0, 0, 0], [0.01, 0, 0]]), np.array([[0, 0, 0], [255, 100, 1]]))
        result = voxel_downsample(cloud, 1.0)
        np.testing.assert_array_equal(result.rgb, [[128, 50, 0]])

    def test_empty_cloud(self):
        assert len(voxel_downsample(PointCloud.empty(), 0.1)) == 0


class TestCenteredGridAnchor:
    def test_within_one_voxel_below_min(self, rng):
        cloud = PointCloud(rng.uniform([-3, 1, 0], [2, 4, 0.7], (500, 3)))
        anchor = centered_grid_anchor(cloud, 0.05)
        lo = cloud.xyz.min(axis=0)
        assert np.all(anchor <= lo + 1e-12)
        assert np.all(lo - anchor < 0.05 + 1e-12)

    def test_mirrored_cloud_gives_mirrored_centroids(self, rng):
        xyz = rng.uniform([-1, 0, 0], [2, 0.5, 3], (5000, 3))
        mirrored = xyz * [-1.0, 1.0, 1.0]

        def downsample(points):
            cloud = PointCloud(points)
            out = voxel_downsample(cloud, 0.1, anchor=centered_grid_anchor(cloud, 0.1)).xyz
            return out[np.lexsort(out.T[::-1])]

        expected = downsample(xyz) * [-1.0, 1.0, 1.0]
        np.testing.assert_allclose(
            downsample(mirrored), expected[np.lexsort(expected.T[::-1])], atol=1e-9,
        )

    def test_empty_cloud(self):
        np.testing.assert_array_equal(centered_grid_anchor(PointCloud(np.zeros((0, 3))), 0.1), np.zeros(3))

    def test_invalid_voxel(self):
        with pytest.raises(ParameterError):
            centered_grid_anchor(PointCloud(np.zeros((3, 3))), 0.0)
