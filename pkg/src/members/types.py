"""거푸집 부재 타입"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from ..cloud import Axis
from ..geometry import Frame


class MemberCategory(Enum):
    """부재 종류 (보고서 순서: 스터드, 월레, 타이, 브레이스)"""

    STUD = "stud"
    WALE = "wale"
    TIE = "tie"
    BRACE = "brace"

    @property
    def title(self) -> str:
        return self.value.capitalize()

    @property
    def ordering_axis(self) -> Axis:
        """번호 부여와 간격 측정에 쓰는 주축"""
        return Axis.A1 if self is MemberCategory.WALE else Axis.A2

    @classmethod
    def parse(cls, text: str) -> "MemberCategory":
        try:
            return cls(str(text).strip().lower())
        except ValueError:
            raise ValueError(f"unknown member category: {text}")


CATEGORY_ORDER = (MemberCategory.STUD, MemberCategory.WALE, MemberCategory.TIE, MemberCategory.BRACE)


def pair_label(category: MemberCategory, first: str, second: str) -> str:
    """'Stud 1–Stud 2' 형식 라벨 (en dash)"""
    return f"{category.title} {first}–{category.title} {second}"


@dataclass(frozen=True, eq=False)
class Member:
    """
    인식된 부재

    Args:
        category: 부재 종류
        label: 번호 ("1", "2", ... / 타이는 "1_1" 형식)
        indices: 변환 클라우드 내 점 인덱스 (오름차순)
        mean_a1, mean_a2, mean_a3: 주축별 좌표 평균 (m)
        lines: RANSAC 직선 (브레이스는 기둥당 하나씩 두 개)
        group: 타이 그룹 번호 (= 월레 번호), 나머지는 None
    """

    category: MemberCategory
    label: str
    indices: np.ndarray
    mean_a1: float
    mean_a2: float
    mean_a3: float
    lines: tuple = field(default=())
    group: Optional[int] = None

    @property
    def name(self) -> str:
        return f"{self.category.title} {self.label}"

    def mean_on(self, axis: Axis) -> float:
        return (self.mean_a1, self.mean_a2, self.mean_a3)[axis.column]

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "label": self.label,
            "n_points": int(len(self.indices)),
            "mean_a1": self.mean_a1,
            "mean_a2": self.mean_a2,
            "mean_a3": self.mean_a3,
            "lines": [line.to_dict() for line in self.lines],
        }


@dataclass(frozen=True, eq=False)
class MemberSet:
    """카테고리별로 번호가 매겨진 부재 집합"""

    members: dict
    frame: Frame
    axis3_sign: int

    def get(self, category: MemberCategory) -> tuple:
        return tuple(self.members.get(category, ()))

    def counts(self) -> dict:
        return {c: len(self.get(c)) for c in CATEGORY_ORDER}

    def all_members(self) -> list:
        return [m for c in CATEGORY_ORDER for m in self.get(c)]

    def tie_groups(self) -> dict:
        """그룹 번호 -> 번호순 타이 목록"""
        groups = {}
        for tie in self.get(MemberCategory.TIE):
            groups.setdefault(tie.group, []).append(tie)
        return dict(sorted(groups.items()))

    def to_dict(self) -> dict:
        return {
            "frame": self.frame.to_dict(),
            "axis3_sign": self.axis3_sign,
            "counts": {c.value: n for c, n in self.counts().items()},
            "members": [m.to_dict() for m in self.all_members()],
        }

