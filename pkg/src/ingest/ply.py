"""ASCII PLY 1.0 읽기/쓰기"""

import logging
import math
from pathlib import Path
from typing import Union

import numpy as np

from ..cloud import PointCloud
from ..errors import PlyParseError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_FLOAT_TYPES = {"float", "float32", "double", "float64"}
_COLOR_TYPES = {"uchar", "uint8"}
_COLOR_NAMES = ("red", "green", "blue")


def _parse_header(lines: list) -> tuple:
    """
    헤더 파싱

    Returns:
        (elements, body_start) - elements는 [{"name", "count", "props", "line"}]
    """
    if not lines or lines[0].strip() != "ply":
        raise PlyParseError(1, "missing 'ply' magic")

    elements = []
    saw_format = False

    for i in range(1, len(lines)):
        line_no = i + 1
        tokens = lines[i].split()
        if not tokens:
            continue

        keyword = tokens[0]
        if keyword == "format":
            if tokens[1:] != ["ascii", "1.0"]:
                raise PlyParseError(line_no, f"unsupported format: {' '.join(tokens[1:])}")
            saw_format = True
        elif keyword in ("comment", "obj_info"):
            continue
        elif keyword == "element":
            if len(tokens) != 3:
                raise PlyParseError(line_no, "malformed element line")
            try:
                count = int(tokens[2])
            except ValueError:
                raise PlyParseError(line_no, f"invalid element count: {tokens[2]}")
            if count < 0:
                raise PlyParseError(line_no, f"invalid element count: {count}")
            elements.append({"name": tokens[1], "count": count, "props": [], "line": line_no})
        elif keyword == "property":
            if not elements:
                raise PlyParseError(line_no, "property before any element")
            if len(tokens) == 5 and tokens[1] == "list":
                elements[-1]["props"].append(("list", tokens[4]))
            elif len(tokens) == 3:
                elements[-1]["props"].append((tokens[1], tokens[2]))
            else:
                raise PlyParseError(line_no, "malformed property line")
        elif keyword == "end_header":
            if not saw_format:
                raise PlyParseError(line_no, "missing format line")
            return elements, i + 1
        else:
            raise PlyParseError(line_no, f"unexpected header keyword: {keyword}")

    raise PlyParseError(len(lines), "missing end_header")


def _vertex_layout(vertex: dict) -> tuple:
    """vertex 요소에서 x/y/z 및 색상 열 위치 찾기"""
    names = [name for _, name in vertex["props"]]
    types = {name: ptype for ptype, name in vertex["props"]}

    for axis in ("x", "y", "z"):
        if axis not in types:
            raise PlyParseError(vertex["line"], f"vertex property '{axis}' missing")
        if types[axis] not in _FLOAT_TYPES:
            raise PlyParseError(vertex["line"], f"vertex property '{axis}' must be float")
    if "list" in types.values():
        raise PlyParseError(vertex["line"], "list properties on vertex are not supported")

    xyz_cols = [names.index(a) for a in ("x", "y", "z")]

    color_cols = None
    if all(c in types for c in _COLOR_NAMES):
        if any(types[c] not in _COLOR_TYPES for c in _COLOR_NAMES):
            raise PlyParseError(vertex["line"], "color properties must be uchar")
        color_cols = [names.index(c) for c in _COLOR_NAMES]

    return len(names), xyz_cols, color_cols


def read_ply(path: PathLike) -> PointCloud:
    """
    ASCII PLY 파일을 PointCloud로 읽기 (파일 순서 유지)

    Args:
        path: PLY 파일 경로

    Returns:
        PointCloud (red/green/blue 속성이 있으면 색상 포함)
    """
    path = Path(path)
    with open(path, "r", encoding="ascii", errors="replace") as f:
        lines = f.read().splitlines()

    elements, cursor = _parse_header(lines)
    vertex = next((e for e in elements if e["name"] == "vertex"), None)
    if vertex is None:
        raise PlyParseError(cursor, "no vertex element declared")

    n_props, xyz_cols, color_cols = _vertex_layout(vertex)
    xyz = np.empty((vertex["count"], 3), dtype=np.float64)
    rgb = np.empty((vertex["count"], 3), dtype=np.int64) if color_cols else None

    for element in elements:
        is_vertex = element is vertex
        for k in range(element["count"]):
            # 빈 줄은 건너뜀
            while cursor < len(lines) and not lines[cursor].strip():
                cursor += 1
            if cursor >= len(lines):
                raise PlyParseError(
                    len(lines) + 1,
                    f"expected {element['count']} {element['name']} records, found {k}",
                )
            line_no = cursor + 1
            tokens = lines[cursor].split()
            cursor += 1
            if not is_vertex:
                continue

            if len(tokens) != n_props:
                raise PlyParseError(line_no, f"expected {n_props} values, found {len(tokens)}")
            try:
                coords = [float(tokens[c]) for c in xyz_cols]
            except ValueError:
                raise PlyParseError(line_no, "invalid coordinate")
            if not all(math.isfinite(v) for v in coords):
                raise PlyParseError(line_no, "non-finite coordinate")
            xyz[k] = coords

            if color_cols:
                try:
                    color = [int(tokens[c]) for c in color_cols]
                except ValueError:
                    raise PlyParseError(line_no, "invalid color value")
                if any(c < 0 or c > 255 for c in color):
                    raise PlyParseError(line_no, "color value out of range")
                rgb[k] = color

    trailing = [i for i in range(cursor, len(lines)) if lines[i].strip()]
    if trailing:
        raise PlyParseError(trailing[0] + 1, "more records than declared")

    logger.info(f"PLY 로드: {path} ({vertex['count']}개 점)")
    return PointCloud(xyz, rgb)


def write_ply(cloud: PointCloud, path: PathLike) -> None:
    """
    PointCloud를 ASCII PLY로 저장 (좌표 소수점 6자리)

    Args:
        cloud: 저장할 클라우드
        path: 출력 경로 (상위 디렉토리는 자동 생성)
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    header = [
        "ply",
        "format ascii 1.0",
        "comment units meters",
        f"element vertex {len(cloud)}",
        "property double x",
        "property double y",
        "property double z",
    ]
    if cloud.has_color:
        header += [f"property uchar {c}" for c in _COLOR_NAMES]
    header.append("end_header")

    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("\n".join(header) + "\n")
        if len(cloud) == 0:
            return
        if cloud.has_color:
            table = np.hstack([cloud.xyz, cloud.rgb.astype(np.float64)])
            np.savetxt(f, table, fmt=["%.6f"] * 3 + ["%d"] * 3)
        else:
            np.savetxt(f, cloud.xyz, fmt="%.6f")

    logger.info(f"PLY 저장: {path} ({len(cloud)}개 점)")
