"""기준 측정값 (줄자/레이저 거리계 측정치) 로드"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import yaml

from ..errors import InputError
from ..members import CATEGORY_ORDER, MemberCategory
from .config import load_structured

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceMeasurements:
    """카테고리별 {부재 쌍 라벨: 값(mm)}"""

    values: dict

    def __post_init__(self):
        normalized = {}
        for category, pairs in self.values.items():
            category = category if isinstance(category, MemberCategory) else MemberCategory.parse(category)
            clean = {}
            for label, value in dict(pairs).items():
                if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                    raise InputError(f"reference value for '{label}' must be > 0")
                clean[str(label)] = float(value)
            if clean:
                normalized[category] = clean
        object.__setattr__(self, "values", normalized)

    def categories(self) -> list:
        return [c for c in CATEGORY_ORDER if c in self.values]

    def get(self, category: MemberCategory) -> dict:
        return dict(self.values.get(category, {}))

    def labels(self) -> list:
        return [label for c in self.categories() for label in self.values[c]]

    def __len__(self) -> int:
        return sum(len(v) for v in self.values.values())

    def to_dict(self) -> dict:
        return {
            c.value: [{"label": label, "value_mm": value} for label, value in self.values[c].items()]
            for c in self.categories()
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ReferenceMeasurements":
        """
        dict -> ReferenceMeasurements

        두 형식을 받습니다:
        - 기준값 파일: {category: [{label, value_mm}, ...]}
        - 정답(ground truth) 파일: {"pairs": {category: [{label, spacing_mm}, ...]}, ...}
        """
        if not isinstance(raw, dict):
            raise InputError("references must be an object")

        if "pairs" in raw and isinstance(raw["pairs"], dict):
            source, value_key = raw["pairs"], "spacing_mm"
        else:
            source, value_key = raw, "value_mm"

        values = {}
        for key, entries in source.items():
            try:
                category = MemberCategory.parse(key)
            except ValueError as e:
                raise InputError(str(e))
            if not isinstance(entries, list):
                raise InputError(f"references for '{key}' must be a list")

            pairs = {}
            for entry in entries:
                if not isinstance(entry, dict) or "label" not in entry or value_key not in entry:
                    raise InputError(f"reference entries need 'label' and '{value_key}'")
                label = str(entry["label"])
                if label in pairs:
                    raise InputError(f"duplicate reference label: {label}")
                pairs[label] = entry[value_key]
            values[category] = pairs

        return cls(values)


def read_references(path: Union[str, Path]) -> ReferenceMeasurements:
    """기준값 파일 또는 정답 JSON/YAML 읽기"""
    try:
        raw = load_structured(path)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise InputError(f"references parse error: {e}")

    refs = ReferenceMeasurements.from_dict(raw)
    logger.info(f"기준값 로드: {path} ({len(refs)}개 쌍)")
    return refs
