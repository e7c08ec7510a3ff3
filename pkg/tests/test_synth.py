"""합성 장면 생성기 테스트"""

import json
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from conftest import noise_free
from src.errors import SceneSpecError
from src.members import MemberCategory
from src.synth import (
    SceneSpec,
    apply_pose,
    generate_scene,
    ground_truth_references,
    read_scene_spec,
    scene_spec_from_dict,
    suggested_crop_box,
    with_seed,
    write_ground_truth,
)
from src.synth.benchmark import _pooled

MEMBER_SOURCES = ("stud", "wale", "tie", "brace")


@pytest.fixture(scope="module")
def default_scene():
    spec = SceneSpec(case_label="objective1")
    cloud, truth = generate_scene(spec)
    return spec, cloud, truth


class TestGenerateScene:
    def test_same_seed_same_cloud(self, default_scene):
        spec, cloud, truth = default_scene
        again, truth_again = generate_scene(spec)
        np.testing.assert_array_equal(again.xyz, cloud.xyz)
        assert truth_again == truth

    def test_different_seed(self, default_scene):
        spec, cloud, _ = default_scene
        other, _ = generate_scene(with_seed(spec, 7))
        assert len(other) != len(cloud) or not np.array_equal(other.xyz, cloud.xyz)

    def test_member_counts(self, default_scene):
        _, _, truth = default_scene
        assert truth.counts() == {
            MemberCategory.STUD: 11, MemberCategory.WALE: 2, MemberCategory.TIE: 8, MemberCategory.BRACE: 2,
        }

    def test_pair_counts(self, default_scene):
        _, _, truth = default_scene
        assert [len(truth.pairs[c]) for c in MemberCategory] == [10, 1, 6, 1]

    def test_spacing_matches_jittered_positions(self, default_scene):
        _, _, truth = default_scene
        studs = [pos for _, pos in truth.positions[MemberCategory.STUD]]
        expected = np.diff(studs) * 1000.0
        np.testing.assert_allclose([v for _, v in truth.pairs[MemberCategory.STUD]], expected)
        # jitter 5 mm -> 300 mm 근처
        assert all(abs(v - 300.0) < 30.0 for _, v in truth.pairs[MemberCategory.STUD])

    def test_no_jitter_gives_nominal_spacing(self):
        _, truth = generate_scene(noise_free(SceneSpec()))
        np.testing.assert_allclose([v for _, v in truth.pairs[MemberCategory.STUD]], 300.0)
        np.testing.assert_allclose([v for _, v in truth.pairs[MemberCategory.WALE]], 1600.0)
        np.testing.assert_allclose([v for _, v in truth.pairs[MemberCategory.TIE]], 900.0)
        np.testing.assert_allclose([v for _, v in truth.pairs[MemberCategory.BRACE]], 1800.0)

    def test_tie_labels_restart_per_wale(self, default_scene):
        _, _, truth = default_scene
        labels = [label for label, _ in truth.pairs[MemberCategory.TIE]]
        assert labels == [
            "Tie 1_1–Tie 1_2", "Tie 1_2–Tie 1_3", "Tie 1_3–Tie 1_4",
            "Tie 2_1–Tie 2_2", "Tie 2_2–Tie 2_3", "Tie 2_3–Tie 2_4",
        ]

    def test_references(self, default_scene):
        _, _, truth = default_scene
        refs = ground_truth_references(truth)
        assert len(refs.get(MemberCategory.STUD)) == 10
        assert len(refs) == 18

    def test_source_mask(self):
        spec = noise_free(SceneSpec())
        cloud, truth = generate_scene(spec)
        studs = cloud.xyz[truth.source_mask("stud")]
        per_stud = spec.density * spec.stud_width * spec.stud_height
        assert len(studs) / 11 == pytest.approx(per_stud, rel=0.02)
        np.testing.assert_allclose(studs[:, 1], spec.stud_depth)

        wales = cloud.xyz[truth.source_mask("wale")]
        np.testing.assert_allclose(wales[:, 1], spec.wale_front)
        assert not truth.source_mask("outlier").any()

    def test_stud_sides_are_sparse(self):
        spec = noise_free(SceneSpec())
        cloud, truth = generate_scene(spec)
        sides = cloud.xyz[truth.source_mask("stud_side")]
        # 지터 격자: 셀 크기 = 1 / sqrt(밀도)
        step = 1.0 / np.sqrt(spec.density * spec.side_density_ratio)
        per_face = round(spec.stud_depth / step) * round(spec.stud_height / step)
        assert len(sides) == 22 * per_face
        assert sides[:, 1].min() >= 0.0
        assert sides[:, 1].max() <= spec.stud_depth

        edges = np.concatenate([np.arange(11) * 0.3 - 0.05, np.arange(11) * 0.3 + 0.05])
        assert np.abs(sides[:, [0]] - edges).min(axis=1).max() < 1e-9

        _, bare = generate_scene(replace(spec, side_density_ratio=0.0))
        assert not bare.source_mask("stud_side").any()

    def test_ties_are_small_dense_blobs(self):
        spec = noise_free(SceneSpec())
        cloud, truth = generate_scene(spec)
        ties = cloud.xyz[truth.source_mask("tie")]
        assert len(ties) / 8 == pytest.approx(spec.tie_density * 2 * np.pi * spec.tie_radius ** 2, rel=0.05)

        # 첫 타이: u 0.15, 월레 1 높이 0.6, 중심 깊이 = 월레 전면 + offset
        center = np.array([0.15, spec.wale_front + spec.tie_offset, 0.6])
        first = ties[np.linalg.norm(ties - center, axis=1) < 0.1]
        assert len(first) == len(ties) // 8
        np.testing.assert_allclose(np.linalg.norm(first - center, axis=1), spec.tie_radius, atol=1e-12)
        assert (first[:, 1] >= center[1]).all()
        assert abs(first[:, 0].mean() - 0.15) < 1e-3

    def test_brace_poles_are_half_pipes(self):
        spec = noise_free(SceneSpec())
        cloud, truth = generate_scene(spec)
        braces = cloud.xyz[truth.source_mask("brace")]
        first = braces[braces[:, 0] < 1.5]

        # 축(u = 0.6)에서 반지름만큼 떨어져 있고 스캐너 쪽 절반만
        assert np.abs(first[:, 0] - 0.6).max() <= spec.brace_radius + 1e-12
        assert abs(first[:, 0].mean() - 0.6) < 1e-3
        assert first[:, 1].min() >= spec.wale_front + spec.brace_top_gap - 1e-12

    def test_outlier_fraction(self, default_scene):
        _, cloud, truth = default_scene
        n_outliers = int(truth.source_mask("outlier").sum())
        assert n_outliers == int(round(0.01 * (len(cloud) - n_outliers)))

    def test_no_braces(self):
        _, truth = generate_scene(replace(noise_free(SceneSpec()), brace_positions=()))
        assert truth.counts()[MemberCategory.BRACE] == 0
        assert MemberCategory.BRACE not in ground_truth_references(truth).categories()

    def test_ground_truth_file(self, default_scene, tmp_path):
        _, _, truth = default_scene
        path = write_ground_truth(truth, tmp_path / "truth.json")
        data = json.loads(path.read_text(encoding="utf-8"))
        assert data["case"] == "objective1"
        assert data["categories"]["tie"]["count"] == 8
        assert len(data["pairs"]["stud"]) == 10
        assert "assumptions" in data


class TestPose:
    def test_crop_box_contains_members(self):
        for yaw in (0.0, 30.0, 90.0):
            spec = replace(noise_free(SceneSpec()), yaw_deg=yaw, translation=(5.0, -2.0, 0.3))
            cloud, truth = generate_scene(spec)
            box = suggested_crop_box(spec)
            for source in MEMBER_SOURCES:
                assert box.contains(cloud.xyz[truth.source_mask(source)]).all()

    def test_mirror_flips_depth(self):
        spec = replace(SceneSpec(), mirrored=True)
        moved = apply_pose(np.array([[1.0, 0.05, 2.0]]), spec)
        np.testing.assert_allclose(moved, [[1.0, -0.05, 2.0]])

    def test_yaw_rotates_about_z(self):
        spec = replace(SceneSpec(), yaw_deg=90.0)
        moved = apply_pose(np.array([[1.0, 0.0, 2.0]]), spec)
        np.testing.assert_allclose(moved, [[0.0, 1.0, 2.0]], atol=1e-12)


class TestSceneSpecValidation:
    def test_negative_spacing_names_field(self):
        with pytest.raises(SceneSpecError) as info:
            SceneSpec(stud_spacing=-0.3)
        assert info.value.field == "stud_spacing"
        assert info.value.exit_code == 2

    def test_unknown_field(self):
        with pytest.raises(SceneSpecError, match="unknown field: studs") as info:
            scene_spec_from_dict({"studs": 11})
        assert info.value.field == "studs"

    def test_descending_wales(self):
        with pytest.raises(SceneSpecError) as info:
            SceneSpec(wale_elevations=(2.2, 0.6))
        assert info.value.field == "wale_elevations"

    def test_bool_is_not_a_count(self):
        with pytest.raises(SceneSpecError):
            SceneSpec(stud_count=True)

    def test_yaml_file(self, write_text):
        path = write_text("scene.yaml", "case_label: small\nstud_count: 4\nbrace_positions: []\nseed: 3\n")
        spec = read_scene_spec(path)
        assert spec.stud_count == 4
        assert spec.brace_positions == ()
        assert spec.seed == 3


class TestPooledSummary:
    def test_weights_runs_by_pair_count(self):
        scored = pd.DataFrame({"n_pairs": [2, 18], "mae_mm": [10.0, 1.0], "mape_pct": [5.0, 0.5]})
        # 실행 평균이면 5.5 mm
        assert _pooled(scored, "mae_mm") == pytest.approx(1.9)
        assert _pooled(scored, "mape_pct") == pytest.approx(0.95)

    def test_no_scored_runs(self):
        assert _pooled(pd.DataFrame(columns=["n_pairs", "mae_mm"]), "mae_mm") is None
