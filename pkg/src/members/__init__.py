from .counting import PeakCount, classify_tie_brace, count_members_by_peaks
from .recognition import partition_by_intervals, recognize_members
from .segmentation import (
    cluster_ties_braces,
    identify_axis3_direction,
    isolate_beyond_wales,
    segment_wales,
)
from .types import CATEGORY_ORDER, Member, MemberCategory, MemberSet, pair_label

__all__ = [
    "CATEGORY_ORDER",
    "Member",
    "MemberCategory",
    "MemberSet",
    "PeakCount",
    "classify_tie_brace",
    "cluster_ties_braces",
    "count_members_by_peaks",
    "identify_axis3_direction",
    "isolate_beyond_wales",
    "pair_label",
    "partition_by_intervals",
    "recognize_members",
    "segment_wales",
]
