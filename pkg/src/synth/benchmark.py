"""합성 장면 반복 벤치마크 - 시드별 병렬 실행"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from datetime import datetime
from typing import Iterable

import pandas as pd

from ..errors import PairingError, ParameterError
from ..ingest import PipelineConfig
from ..pipeline import MeasurementPipeline
from ..spacing import build_report
from .scene import SceneSpec, generate_scene, ground_truth_references, with_seed

logger = logging.getLogger(__name__)

BENCHMARK_COLUMNS = [
    "seed", "success", "counts_correct", "n_pairs", "mae_mm", "mape_pct", "elapsed_ms", "error",
]


def _run_seed(spec: SceneSpec, pipeline: MeasurementPipeline, seed: int) -> dict:
    """시드 하나: 장면 생성 -> 측정 -> 정답 비교"""
    start_time = datetime.now()
    cloud, truth = generate_scene(with_seed(spec, seed))

    row = {
        "seed": seed,
        "success": False,
        "counts_correct": False,
        "n_pairs": 0,
        "mae_mm": None,
        "mape_pct": None,
        "elapsed_ms": 0.0,
        "error": None,
    }

    result = pipeline.run(cloud, case_label=f"{spec.case_label}_{seed}")
    if result["success"]:
        row["success"] = True
        row["counts_correct"] = result["members"].counts() == truth.counts()
        if row["counts_correct"]:
            references = ground_truth_references(truth)
            # 개수가 맞아도 타이 그룹 배정이 다르면 라벨이 어긋날 수 있음
            try:
                report = build_report(result["report"].results, references, result["report"].case_label)
            except PairingError as e:
                row["error"] = str(e)
            else:
                if report.all_block is not None:
                    row["n_pairs"] = report.all_block.n
                    row["mae_mm"] = report.all_block.mae_mm
                    row["mape_pct"] = report.all_block.mape_pct
    else:
        row["error"] = result["error"]

    row["elapsed_ms"] = (datetime.now() - start_time).total_seconds() * 1000
    return row


def _pooled(scored: pd.DataFrame, column: str):
    """실행별 지표를 간격 쌍 수로 가중 평균 = 모든 쌍을 합친 지표"""
    if scored.empty:
        return None
    weights = scored["n_pairs"].astype(float)
    values = pd.to_numeric(scored[column], errors="coerce").astype(float)
    return float((values * weights).sum() / weights.sum())


def run_benchmark(
    spec: SceneSpec,
    cfg: PipelineConfig,
    seeds: Iterable[int],
    max_workers: int = 4,
) -> dict:
    """
    여러 시드로 장면을 만들어 측정 정확도 집계

    Args:
        spec: 기본 장면 설명 (seed는 시드 목록으로 대체)
        cfg: 파이프라인 설정 (crop_box는 장면 자세에 맞아야 함)
        seeds: 시드 목록
        max_workers: 최대 병렬 워커 수

    Returns:
        {
            "runs": pd.DataFrame,  # 시드별 행 (seed 오름차순)
            "summary": {
                "runs": int,
                "succeeded": int,
                "count_correct": int,
                "pooled_mae_mm": float | None,  # 개수가 맞은 실행의 모든 간격 쌍 기준
                "pooled_mape_pct": float | None,
                "elapsed_ms": float
            }
        }
    """
    seeds = sorted(set(int(s) for s in seeds))
    if not seeds:
        raise ParameterError("at least one seed is required")
    if max_workers < 1:
        raise ParameterError("max_workers must be >= 1")

    pipeline = MeasurementPipeline(cfg)
    start_time = datetime.now()
    rows = []
    errors = []

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(_run_seed, spec, pipeline, seed): seed for seed in seeds}

        for future in as_completed(futures):
            seed = futures[future]
            try:
                rows.append(future.result())
            except Exception as e:
                errors.append(f"seed {seed}: {e}")
                rows.append({
                    "seed": seed, "success": False, "counts_correct": False, "n_pairs": 0,
                    "mae_mm": None, "mape_pct": None, "elapsed_ms": 0.0, "error": str(e),
                })

    if errors:
        logger.warning(f"일부 시드 실행 실패: {errors}")

    runs = pd.DataFrame(rows, columns=BENCHMARK_COLUMNS).sort_values("seed").reset_index(drop=True)
    correct = runs[runs["counts_correct"].astype(bool)]
    scored = correct.dropna(subset=["mae_mm"])
    scored = scored[scored["n_pairs"] > 0]

    summary = {
        "runs": len(runs),
        "succeeded": int(runs["success"].sum()),
        "count_correct": len(correct),
        "pooled_mae_mm": _pooled(scored, "mae_mm"),
        "pooled_mape_pct": _pooled(scored, "mape_pct"),
        "elapsed_ms": (datetime.now() - start_time).total_seconds() * 1000,
    }
    logger.info(
        f"벤치마크 완료: {summary['count_correct']}/{summary['runs']}회 개수 일치, "
        f"통합 MAE {summary['pooled_mae_mm']}"
    )
    return {"runs": runs, "summary": summary}
