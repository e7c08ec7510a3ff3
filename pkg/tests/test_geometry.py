"""RANSAC / PCA / 좌표 변환 테스트"""

import numpy as np
import pytest

from src.cloud import PointCloud
from src.errors import DegenerateGeometryError, FitFailure, ParameterError
from src.geometry import Frame, detect_stud_frame, pca_frame, ransac_line, ransac_plane, transform_to_frame


def _angle_deg(a: np.ndarray, b: np.ndarray) -> float:
    cos = abs(float(np.dot(a, b))) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.degrees(np.arccos(min(cos, 1.0))))


class TestRansacPlane:
    def test_recovers_tilted_plane(self, rng):
        normal = np.array([0.2, -0.3, 1.0])
        normal /= np.linalg.norm(normal)
        u = np.cross(normal, [1.0, 0, 0])
        u /= np.linalg.norm(u)
        v = np.cross(normal, u)

        s, t = rng.uniform(-1, 1, (2, 1000))
        on_plane = np.outer(s, u) + np.outer(t, v) + np.outer(rng.normal(0, 0.001, 1000), normal)
        outliers = rng.uniform(-1, 1, (50, 3))
        xyz = np.vstack([on_plane, outliers])

        plane, inliers = ransac_plane(xyz, 0.01, 500, seed=3)
        assert _angle_deg(plane.n, normal) < 0.1
        assert np.count_nonzero(inliers < 1000) >= 990

    def test_coplanar_points_are_all_inliers(self, rng):
        xyz = np.column_stack([rng.uniform(0, 1, 200), rng.uniform(0, 1, 200), np.full(200, 2.0)])
        plane, inliers = ransac_plane(xyz, 0.001, 50, seed=0)
        np.testing.assert_array_equal(inliers, np.arange(200))
        np.testing.assert_allclose(plane.distance(xyz), 0.0, atol=1e-12)

    def test_deterministic_for_same_seed(self, rng):
        xyz = rng.normal(0, 1, (300, 3))
        a, ia = ransac_plane(xyz, 0.05, 100, seed=[7, 1])
        b, ib = ransac_plane(xyz, 0.05, 100, seed=[7, 1])
        np.testing.assert_array_equal(ia, ib)
        np.testing.assert_array_equal(a.n, b.n)
        assert a.d == b.d

    def test_best_candidate_has_most_inliers(self, rng):
        xyz = np.vstack([
            np.column_stack([rng.uniform(0, 1, 300), rng.uniform(0, 1, 300), np.zeros(300)]),
            rng.uniform(0, 1, (100, 3)),
        ])
        counts = []
        _, inliers = ransac_plane(xyz, 0.01, 60, seed=5, on_iteration=lambda i, m, c: counts.append(c))
        assert len(counts) == 60
        assert len(inliers) == max(counts)

    def test_collinear_cloud(self):
        xyz = np.column_stack([np.arange(10.0), np.zeros(10), np.zeros(10)])
        with pytest.raises(FitFailure):
            ransac_plane(xyz, 0.01, 10, seed=0)

    def test_too_few_points(self):
        with pytest.raises(FitFailure):
            ransac_plane(np.zeros((2, 3)), 0.01, 10, seed=0)

    def test_invalid_threshold(self, rng):
        with pytest.raises(ParameterError):
            ransac_plane(rng.normal(0, 1, (10, 3)), 0.0, 10, seed=0)


class TestRansacLine:
    def test_line_with_outliers(self, rng):
        t = rng.uniform(-2, 2, 400)
        direction = np.array([1.0, 2.0, 2.0]) / 3.0
        xyz = np.vstack([
            np.outer(t, direction) + rng.normal(0, 0.001, (400, 3)),
            rng.uniform(-2, 2, (40, 3)),
        ])
        line, inliers = ransac_line(xyz, 0.01, 300, seed=1)
        assert _angle_deg(line.u, direction) < 0.2
        assert np.count_nonzero(inliers < 400) >= 395

    def test_two_points(self):
        line, inliers = ransac_line(np.array([[0.0, 0, 0], [0, 0, 2.0]]), 0.01, 5, seed=0)
        np.testing.assert_allclose(line.u, [0, 0, 1.0])
        np.testing.assert_array_equal(inliers, [0, 1])

    def test_coincident_points(self):
        with pytest.raises(FitFailure):
            ransac_line(np.ones((5, 3)), 0.01, 5, seed=0)


class TestPcaFrame:
    def test_matches_brute_force_eigendecomposition(self, rng):
        xyz = rng.normal(0, 1, (500, 3)) * [3.0, 1.0, 0.2]
        frame = pca_frame(xyz)

        centered = xyz - xyz.mean(axis=0)
        cov = centered.T @ centered / len(xyz)
        for axis, expected in zip(frame.matrix, np.linalg.eigh(cov)[0][::-1]):
            assert float(axis @ cov @ axis) == pytest.approx(expected, rel=1e-9)

    def test_rectangle_orientation(self, rng):
        # 수직 방향이 긴 직사각형 면 -> a1 = +Z, a2 = +X
        xyz = np.column_stack([rng.uniform(0, 0.1, 2000), np.full(2000, 0.05), rng.uniform(0, 3.0, 2000)])
        frame = pca_frame(xyz)
        assert _angle_deg(frame.a1, [0, 0, 1]) < 1.0
        assert frame.a1[2] > 0
        assert frame.a2[0] > 0
        np.testing.assert_allclose(np.cross(frame.a1, frame.a2), frame.a3, atol=1e-12)

    def test_sign_convention_for_random_directions(self, rng):
        for _ in range(20):
            q, _ = np.linalg.qr(rng.normal(0, 1, (3, 3)))
            xyz = (rng.normal(0, 1, (300, 3)) * [4.0, 2.0, 0.5]) @ q.T
            frame = pca_frame(xyz)
            assert frame.a1[2] >= -1e-9
            assert frame.a2[np.argmax(np.abs(frame.a2))] > 0
            np.testing.assert_allclose(frame.matrix @ frame.matrix.T, np.eye(3), atol=1e-9)

    def test_orthonormal_right_handed_for_random_clouds(self, rng):
        for _ in range(200):
            q, _ = np.linalg.qr(rng.normal(0, 1, (3, 3)))
            scales = np.sort(rng.uniform(0.05, 5.0, 3))[::-1]
            n = int(rng.integers(10, 400))
            xyz = (rng.normal(0, 1, (n, 3)) * scales) @ q.T + rng.uniform(-100, 100, 3)
            frame = pca_frame(xyz)

            np.testing.assert_allclose(frame.matrix @ frame.matrix.T, np.eye(3), atol=1e-12)
            assert np.linalg.det(frame.matrix) == pytest.approx(1.0, abs=1e-12)
            np.testing.assert_allclose(np.cross(frame.a1, frame.a2), frame.a3, atol=1e-12)
            assert frame.a1[2] >= -1e-9

    def test_collinear_points_are_degenerate(self):
        xyz = np.column_stack([np.arange(5.0), np.arange(5.0), np.zeros(5)])
        with pytest.raises(DegenerateGeometryError):
            pca_frame(xyz)


class TestTransform:
    def test_rigid(self, rng):
        q, _ = np.linalg.qr(rng.normal(0, 1, (3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 2] = -q[:, 2]
        frame = Frame(rng.normal(0, 1, 3), q[:, 0], q[:, 1], q[:, 2])

        cloud = PointCloud(rng.uniform(-5, 5, (100, 3)))
        moved = transform_to_frame(cloud, frame)

        def pairwise(xyz):
            return np.linalg.norm(xyz[:, None] - xyz[None, :], axis=2)

        np.testing.assert_allclose(pairwise(moved.xyz), pairwise(cloud.xyz), atol=1e-9)

    def test_identity(self, rng):
        cloud = PointCloud(rng.uniform(0, 1, (10, 3)))
        np.testing.assert_allclose(transform_to_frame(cloud, Frame.identity()).xyz, cloud.xyz)

    def test_left_handed_frame_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            Frame(np.zeros(3), [1.0, 0, 0], [0, 1.0, 0], [0, 0, -1.0])


class TestDetectStudFrame:
    def test_studs_define_vertical_a1(self, rng, make_config):
        faces = []
        for u in (0.0, 0.3, 0.6):
            faces.append(np.column_stack([
                rng.uniform(u - 0.05, u + 0.05, 3000),
                np.full(3000, 0.05),
                rng.uniform(0.0, 3.0, 3000),
            ]))
        # 뒤쪽의 작은 평면 (월레 역할)
        faces.append(np.column_stack([rng.uniform(-0.1, 0.7, 800), np.full(800, 0.15), rng.uniform(0.55, 0.65, 800)]))

        cfg = make_config(ransac_iterations=200)
        frame, plane_idx = detect_stud_frame(PointCloud(np.vstack(faces)), cfg)

        assert len(plane_idx) == 9000
        assert _angle_deg(frame.a1, [0, 0, 1]) < 1.0
        assert _angle_deg(frame.a2, [1, 0, 0]) < 1.0
        assert frame.a2[0] > 0

    def test_sparse_side_faces_do_not_tilt_frame(self, rng, make_config):
        fronts, sides = [], []
        for u in (0.0, 0.3, 0.6):
            fronts.append(np.column_stack([
                rng.uniform(u - 0.05, u + 0.05, 3000),
                np.full(3000, 0.05),
                rng.uniform(0.0, 3.0, 3000),
            ]))
            # 측면은 전면의 약 10% 밀도
            for x in (u - 0.05, u + 0.05):
                sides.append(np.column_stack([
                    np.full(150, x), rng.uniform(0.05, 0.15, 150), rng.uniform(0.0, 3.0, 150),
                ]))
        xyz = np.vstack(fronts + sides)

        cfg = make_config(ransac_iterations=200)
        frame, plane_idx = detect_stud_frame(PointCloud(xyz), cfg)

        assert set(range(9000)) <= set(plane_idx.tolist())
        assert np.all(xyz[plane_idx, 1] < 0.05 + 2 * cfg.ransac_distance)
        assert _angle_deg(frame.a1, [0, 0, 1]) < 1.0
        assert _angle_deg(frame.a3, [0, 1, 0]) < 1.0

    def test_no_plane(self, make_config):
        with pytest.raises(FitFailure, match="no stud plane found"):
            detect_stud_frame(PointCloud(np.zeros((2, 3))), make_config())
