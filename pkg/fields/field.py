"""
网格上的标量场和非对角场，以及两种配对
"""
from typing import Optional, Union

import numpy as np

from fields.grid import GridSpec

Number = Union[int, float]


class ScalarField:
    """
    网格节点上的实值场
    """

    def __init__(self, grid: GridSpec, values: np.ndarray):
        """
        初始化标量场

        Args:
            grid: 网格
            values: 节点值，形状为 (M,) 或 grid.shape
        """
        values = np.array(values, dtype=float)
        if values.shape == grid.shape:
            values = values.reshape(-1)
        if values.shape != (grid.size,):
            raise ValueError(f"标量场的形状应为 {(grid.size,)} 或 {grid.shape}，得到 {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("标量场含有非有限值")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def as_grid_array(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def _combine(self, other, op) -> "ScalarField":
        if isinstance(other, ScalarField):
            self.grid.check_same(other.grid)
            return ScalarField(self.grid, op(self.values, other.values))
        return ScalarField(self.grid, op(self.values, float(other)))

    def __add__(self, other) -> "ScalarField":
        return self._combine(other, np.add)

    def __sub__(self, other) -> "ScalarField":
        return self._combine(other, np.subtract)

    def __mul__(self, a: Number) -> "ScalarField":
        return ScalarField(self.grid, float(a) * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)

    def __repr__(self) -> str:
        return f"ScalarField({self.grid!r})"


class OffDiagonalField:
    """
    节点对上的反对称场，稠密存储为 M×M 矩阵

    由 frac_gradient 产生的场记录来源 (source, order)，算子据此做奇异求积修正。
    """

    def __init__(self, grid: GridSpec, values: np.ndarray,
                 source: Optional[ScalarField] = None, order: Optional[float] = None):
        values = np.array(values, dtype=float)
        if values.shape != (grid.size, grid.size):
            raise ValueError(f"非对角场的形状应为 {(grid.size, grid.size)}，得到 {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("非对角场含有非有限值")
        if np.any(np.diagonal(values) != 0.0):
            raise ValueError("非对角场在对角线上必须为 0")
        if not np.array_equal(values, -values.T):
            raise ValueError("非对角场不满足反对称性 F(x,y) = −F(y,x)")
        if (source is None) != (order is None):
            raise ValueError("source 和 order 必须同时给出")
        if source is not None:
            grid.check_same(source.grid)
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.source = source
        self.order = None if order is None else float(order)

    @property
    def has_provenance(self) -> bool:
        return self.source is not None

    def without_provenance(self) -> "OffDiagonalField":
        """去掉来源信息，按普通节点对数据处理"""
        return OffDiagonalField(self.grid, self.values)

    def scaled(self, a: Number) -> "OffDiagonalField":
        source = None if self.source is None else self.source * a
        return OffDiagonalField(self.grid, float(a) * self.values, source, self.order)

    def __add__(self, other: "OffDiagonalField") -> "OffDiagonalField":
        self.grid.check_same(other.grid)
        source, order = None, None
        if self.has_provenance and other.has_provenance and self.order == other.order:
            source, order = self.source + other.source, self.order
        return OffDiagonalField(self.grid, self.values + other.values, source, order)

    def __sub__(self, other: "OffDiagonalField") -> "OffDiagonalField":
        return self + other.scaled(-1.0)

    def restrict(self, index: np.ndarray, sub_grid: GridSpec) -> "OffDiagonalField":
        """取出子网格节点之间的节点对"""
        source = None
        if self.source is not None:
            source = ScalarField(sub_grid, self.source.values[index])
        return OffDiagonalField(sub_grid, self.values[np.ix_(index, index)], source, self.order)

    def __repr__(self) -> str:
        tag = f", order={self.order}" if self.has_provenance else ""
        return f"OffDiagonalField({self.grid!r}{tag})"


def odd_from_upper(raw: np.ndarray) -> np.ndarray:
    """用严格上三角部分构造逐位反对称的矩阵"""
    upper = np.triu(raw, 1)
    return upper - upper.T


def antisymmetrize(grid: GridSpec, raw: np.ndarray) -> OffDiagonalField:
    """
    奇部投影 (F(x,y) − F(y,x))/2

    Args:
        grid: 网格
        raw: 形状为 (M, M) 的节点对值

    Returns:
        反对称场
    """
    raw = np.asarray(raw, dtype=float)
    if raw.shape != (grid.size, grid.size):
        raise ValueError(f"节点对数组的形状应为 {(grid.size, grid.size)}，得到 {raw.shape}")
    if not np.all(np.isfinite(raw)):
        raise ValueError("节点对数组含有非有限值")
    odd = (raw - raw.T) / 2.0
    np.fill_diagonal(odd, 0.0)
    return OffDiagonalField(grid, odd)


def pair_scalar(u: ScalarField, v: ScalarField) -> float:
    """∑ u·v·w ≈ ∫ u v dx"""
    u.grid.check_same(v.grid)
    return float(np.sum(u.values * v.values * u.grid.weights))


def pair_od(F: OffDiagonalField, G: OffDiagonalField) -> float:
    """
    非对角配对 ∑_{i≠j} F G w_i w_j / |x_i − x_j|^n

    Args:
        F: 非对角场
        G: 非对角场

    Returns:
        配对值
    """
    grid = F.grid
    grid.check_same(G.grid)
    w = grid.weights
    total = 0.0
    for rows in grid.row_blocks():
        dist = grid.pair_distances(rows)
        block = F.values[rows] * G.values[rows] * (w[rows, None] * w[None, :]) / dist ** grid.dim
        total += float(np.sum(block))
    return total


def reflect(field: Union[ScalarField, OffDiagonalField]) -> Union[ScalarField, OffDiagonalField]:
    """
    反射：标量场 u(x) ↦ u(−x)（关于网格中心），非对角场 F(x,y) ↦ F(y,x)
    """
    if isinstance(field, OffDiagonalField):
        return OffDiagonalField(field.grid, field.values.T.copy())
    flipped = field.as_grid_array()[(slice(None, None, -1),) * field.grid.dim]
    return ScalarField(field.grid, flipped)
