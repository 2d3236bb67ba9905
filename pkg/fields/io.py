"""
场的CSV编解码

文件第一行为网格头 `# grid n=<n> L=<L> N=<N>`，网格中心不在原点时追加 ` c=<c1>[,<c2>]`。
由 frac_gradient 产生的非对角场在第二行记录来源 `# source order=<s> values=<u1>,<u2>,...`，
读回后算子仍能做奇异求积修正。其后每个节点（标量场）或每个有序节点对（非对角场）一行：
下标列在前，值在最后一列。浮点数以17位有效数字写出，读回时逐位相同。
"""
import io
import re
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from fields.field import ScalarField, OffDiagonalField
from fields.grid import GridSpec
from utils import atomic_write_text

HEADER_PATTERN = re.compile(r"^#\s*grid\s+n=(\d+)\s+L=(\S+)\s+N=(\d+)(?:\s+c=(\S+))?\s*$")
SOURCE_PATTERN = re.compile(r"^#\s*source\s+order=(\S+)\s+values=(\S+)\s*$")


class FieldFormatError(ValueError):
    """
    场文件格式错误，row 为出错的行号（从1开始，网格头是第1行）
    """

    def __init__(self, message: str, row: int = 0):
        super().__init__(f"第 {row} 行: {message}" if row else message)
        self.row = row


def _index_columns(grid: GridSpec, prefix: str) -> List[str]:
    if grid.dim == 1:
        return [prefix]
    return [f"{prefix}1", f"{prefix}2"]


def _node_index_frame(grid: GridSpec, prefix: str, flat: np.ndarray) -> pd.DataFrame:
    columns = _index_columns(grid, prefix)
    multi = np.unravel_index(flat, grid.shape)
    return pd.DataFrame({name: idx for name, idx in zip(columns, multi)})


def _to_text(grid: GridSpec, frame: pd.DataFrame, extra_header: Optional[str] = None) -> str:
    buffer = io.StringIO()
    buffer.write(grid.header() + "\n")
    if extra_header:
        buffer.write(extra_header + "\n")
    frame.to_csv(buffer, index=False, header=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()


def scalar_to_csv(u: ScalarField) -> str:
    """标量场的CSV文本"""
    frame = _node_index_frame(u.grid, "i", np.arange(u.grid.size))
    frame["value"] = u.values
    return _to_text(u.grid, frame)


def od_to_csv(F: OffDiagonalField) -> str:
    """非对角场的CSV文本，按 (i, j) 字典序列出全部 i≠j 的有序对"""
    size = F.grid.size
    rows, cols = np.nonzero(~np.eye(size, dtype=bool))
    frame = pd.concat([_node_index_frame(F.grid, "i", rows), _node_index_frame(F.grid, "j", cols)], axis=1)
    frame["value"] = F.values[rows, cols]
    return _to_text(F.grid, frame, _source_line(F))


def _source_line(F: OffDiagonalField) -> Optional[str]:
    if not F.has_provenance:
        return None
    values = ",".join(f"{v:.17g}" for v in F.source.values)
    return f"# source order={F.order:.17g} values={values}"


def write_field_csv(field: Union[ScalarField, OffDiagonalField], path: str) -> None:
    """原子地写出场文件"""
    text = od_to_csv(field) if isinstance(field, OffDiagonalField) else scalar_to_csv(field)
    atomic_write_text(path, text)


def _parse_floats(text: str, what: str, row: int) -> List[float]:
    try:
        numbers = [float(t) for t in text.split(",")]
    except ValueError:
        raise FieldFormatError(f"无法解析的{what}: {text!r}", row=row)
    if not all(np.isfinite(numbers)):
        raise FieldFormatError(f"{what}含非有限值: {text!r}", row=row)
    return numbers


def _parse_header(line: str) -> GridSpec:
    match = HEADER_PATTERN.match(line.strip())
    if not match:
        raise FieldFormatError(f"缺少或无法解析网格头: {line.strip()!r}", row=1)
    center = None if match.group(4) is None else _parse_floats(match.group(4), "网格中心", 1)
    try:
        return GridSpec(int(match.group(1)), float(match.group(2)), int(match.group(3)), center)
    except ValueError as e:
        raise FieldFormatError(f"网格头无效: {e}", row=1)


def _parse_source(line: str, grid: GridSpec) -> Tuple[ScalarField, float]:
    match = SOURCE_PATTERN.match(line.strip())
    if not match:
        raise FieldFormatError(f"无法解析的来源行: {line.strip()[:80]!r}", row=2)
    order = _parse_floats(match.group(1), "阶数", 2)[0]
    values = _parse_floats(match.group(2), "来源值", 2)
    if len(values) != grid.size:
        raise FieldFormatError(f"来源应有 {grid.size} 个节点值，得到 {len(values)} 个", row=2)
    return ScalarField(grid, np.array(values)), order


def _parse_column(column: pd.Series, kind: str, first_row: int) -> np.ndarray:
    """把一列字符串转为数值，失败时报告第一个出错的行"""
    try:
        values = column.astype(float).to_numpy()
    except (TypeError, ValueError):
        values = None
    if values is not None and np.all(np.isfinite(values)):
        if kind == "float":
            return values
        if np.all(values == np.round(values)):
            return values.astype(np.int64)

    for position, text in enumerate(column.tolist()):
        row = position + first_row
        try:
            number = float(text)
        except (TypeError, ValueError):
            raise FieldFormatError(f"无法解析的数值 {text!r}", row=row)
        if not np.isfinite(number):
            raise FieldFormatError(f"非有限值 {text!r}", row=row)
        if kind == "int" and number != round(number):
            raise FieldFormatError(f"下标不是整数 {text!r}", row=row)
    raise FieldFormatError("无法解析的列")


def read_field_csv(path: str) -> Union[ScalarField, OffDiagonalField]:
    """
    读取场文件，根据列数判断标量场还是非对角场

    Args:
        path: 文件路径

    Returns:
        标量场或非对角场；带来源行的非对角场恢复 (source, order)
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            header = f.readline()
            second = f.readline()
    except OSError as e:
        raise FieldFormatError(f"无法读取文件 {path}: {e}")
    grid = _parse_header(header)
    provenance = _parse_source(second, grid) if second.lstrip().startswith("#") else None
    skip = 1 if provenance is None else 2
    first_row = skip + 1

    try:
        frame = pd.read_csv(path, skiprows=skip, header=None, dtype=str,
                            skip_blank_lines=False, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise FieldFormatError("文件没有数据行", row=first_row)
    except pd.errors.ParserError as e:
        raise FieldFormatError(f"列数不一致: {e}")

    scalar_width = grid.dim + 1
    od_width = 2 * grid.dim + 1
    if frame.shape[1] not in (scalar_width, od_width):
        raise FieldFormatError(f"每行应有 {scalar_width} 或 {od_width} 列，得到 {frame.shape[1]} 列", row=first_row)
    if provenance is not None and frame.shape[1] != od_width:
        raise FieldFormatError("只有非对角场可以带来源行", row=2)

    columns = [_parse_column(frame[c], "int", first_row) for c in frame.columns[:-1]]
    values = _parse_column(frame[frame.columns[-1]], "float", first_row)
    for column in columns:
        bad = np.nonzero((column < 0) | (column >= grid.points_per_axis))[0]
        if len(bad):
            raise FieldFormatError(f"下标越界 {column[bad[0]]}", row=int(bad[0]) + first_row)

    if frame.shape[1] == scalar_width:
        return _assemble_scalar(grid, columns, values, first_row)
    F = _assemble_od(grid, columns, values, first_row)
    if provenance is None:
        return F
    source, order = provenance
    return OffDiagonalField(grid, F.values, source, order)


def _flat_index(grid: GridSpec, columns: List[np.ndarray]) -> np.ndarray:
    return np.ravel_multi_index(tuple(columns), grid.shape)


def _first_duplicate(flat: np.ndarray) -> int:
    _, first = np.unique(flat, return_index=True)
    seen = np.zeros(len(flat), dtype=bool)
    seen[first] = True
    return int(np.nonzero(~seen)[0][0])


def _assemble_scalar(grid: GridSpec, columns: List[np.ndarray], values: np.ndarray,
                     first_row: int) -> ScalarField:
    flat = _flat_index(grid, columns)
    if len(np.unique(flat)) != len(flat):
        raise FieldFormatError("节点重复", row=_first_duplicate(flat) + first_row)
    if len(flat) != grid.size:
        raise FieldFormatError(f"应有 {grid.size} 个节点，得到 {len(flat)} 个")
    out = np.empty(grid.size)
    out[flat] = values
    return ScalarField(grid, out)


def _assemble_od(grid: GridSpec, columns: List[np.ndarray], values: np.ndarray,
                 first_row: int) -> OffDiagonalField:
    half = grid.dim
    rows = _flat_index(grid, columns[:half])
    cols = _flat_index(grid, columns[half:])
    diagonal = np.nonzero(rows == cols)[0]
    if len(diagonal):
        raise FieldFormatError("非对角场文件不能包含对角线节点对", row=int(diagonal[0]) + first_row)
    pair = rows * grid.size + cols
    if len(np.unique(pair)) != len(pair):
        raise FieldFormatError("节点对重复", row=_first_duplicate(pair) + first_row)
    expected = grid.size * (grid.size - 1)
    if len(pair) != expected:
        raise FieldFormatError(f"应有 {expected} 个有序节点对，得到 {len(pair)} 个")

    matrix = np.zeros((grid.size, grid.size))
    matrix[rows, cols] = values
    mismatch = np.nonzero(matrix[rows, cols] != -matrix[cols, rows])[0]
    if len(mismatch):
        raise FieldFormatError("节点对的值不满足反对称性", row=int(mismatch[0]) + first_row)
    return OffDiagonalField(grid, matrix)


def field_summary(field: Union[ScalarField, OffDiagonalField]) -> Tuple[float, float]:
    """(最小值, 最大值)"""
    return float(np.min(field.values)), float(np.max(field.values))
