"""간격 보고서 JSON/CSV 내보내기 및 다시 읽기"""

import json
import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from ..errors import InputError, ParameterError
from ..ingest.references import ReferenceMeasurements
from ..members import MemberCategory
from ..spacing import SpacingReport, SpacingResult, build_report

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

REPORT_FORMATS = ("json", "csv")
CSV_COLUMNS = ["category", "label", "pc_mm", "mt_mm", "abs_err_mm"]


def _r2(value: float) -> float:
    return round(float(value), 2)


def _block_dict(block) -> dict:
    return {
        "mae_mm": _r2(block.mae_mm),
        "mape_pct": _r2(block.mape_pct),
        "n": block.n,
        "std_mm": _r2(block.std_mm),
        "std_pct": _r2(block.std_pct),
    }


def report_to_dict(report: SpacingReport) -> dict:
    """
    보고서 -> JSON 구조

    {"case", "categories": {category: {"pairs": [{label, pc_mm, mt_mm?, abs_err_mm?}],
    mae_mm?, mape_pct?, n?, std_mm?, std_pct?}}, "all"?: {...}}
    """
    rows = report.rows()
    categories = {}
    for category in report.categories():
        pairs = []
        for row in rows:
            if row["category"] != category.value:
                continue
            pair = {"label": row["label"], "pc_mm": _r2(row["pc_mm"])}
            if row["mt_mm"] is not None:
                pair["mt_mm"] = _r2(row["mt_mm"])
                pair["abs_err_mm"] = _r2(row["abs_err_mm"])
            pairs.append(pair)

        entry = {"pairs": pairs}
        if category in report.blocks:
            entry.update(_block_dict(report.blocks[category]))
        categories[category.value] = entry

    data = {"case": report.case_label, "categories": categories}
    if report.all_block is not None:
        data["all"] = _block_dict(report.all_block)
    return data


def report_frame(report: SpacingReport) -> pd.DataFrame:
    """쌍별 행 DataFrame (CSV 열 순서)"""
    return pd.DataFrame(report.rows(), columns=CSV_COLUMNS)


def write_report(report: SpacingReport, path: PathLike, format: Optional[str] = None) -> Path:
    """
    보고서 저장

    Args:
        report: 저장할 보고서
        path: 출력 경로 (상위 디렉토리 자동 생성)
        format: "json" 또는 "csv". None이면 확장자로 결정 (.csv 외에는 json)

    Returns:
        저장된 파일 경로
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "json"
    if format not in REPORT_FORMATS:
        raise ParameterError(f"unsupported report format: {format}")

    path.parent.mkdir(parents=True, exist_ok=True)

    if format == "csv":
        df = report_frame(report)
        df.to_csv(path, index=False, encoding="utf-8", float_format="%.2f", na_rep="", lineterminator="\n")
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(report_to_dict(report), f, indent=2, ensure_ascii=False)
            f.write("\n")

    logger.info(f"보고서 저장: {path} ({format}, {len(report.results)}개 쌍)")
    return path


def read_report(path: PathLike) -> SpacingReport:
    """JSON 보고서를 다시 SpacingReport로 (mt_mm이 있으면 기준값으로 복원)"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InputError(f"report parse error: {e}")

    if not isinstance(data, dict) or not isinstance(data.get("categories"), dict):
        raise InputError("report must contain a 'categories' object")

    results = []
    references = {}
    for key, entry in data["categories"].items():
        try:
            category = MemberCategory.parse(key)
        except ValueError as e:
            raise InputError(str(e))
        for pair in entry.get("pairs", []):
            if "label" not in pair or "pc_mm" not in pair:
                raise InputError("report pairs need 'label' and 'pc_mm'")
            results.append(SpacingResult(
                category=category,
                pair_label=pair["label"],
                value_mm=float(pair["pc_mm"]),
                axis=category.ordering_axis,
            ))
            if "mt_mm" in pair:
                references.setdefault(category, {})[pair["label"]] = float(pair["mt_mm"])

    refs = ReferenceMeasurements(references) if references else None
    return build_report(results, refs, case_label=str(data.get("case", path.stem)))


def write_table(table: pd.DataFrame, path: PathLike, index: bool = False) -> Path:
    """요약/벤치마크 표 CSV 저장"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=index, encoding="utf-8", lineterminator="\n")
    logger.info(f"표 저장: {path} ({len(table)}행)")
    return path
