"""
均匀张量网格、指数组和磨光核
"""
import logging
import math
from functools import lru_cache
from typing import Dict, Any, Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.spatial.distance import cdist

from config import GRID_CONFIG, QUADRATURE_CONFIG

logger = logging.getLogger("fracbench.fields")


class GridMismatchError(ValueError):
    """两个场不在同一网格上"""


class GridSpec:
    """
    [c−L, c+L]^n 上的截断均匀张量网格，带梯形求积权重

    节点按C顺序展平：二维时下标 i = i1·N + i2，i1 对应第一个坐标轴。
    """

    def __init__(self, dim: int, half_width: float, points_per_axis: int,
                 center: Optional[Sequence[float]] = None):
        """
        初始化网格

        Args:
            dim: 空间维数 (1 或 2)
            half_width: 半宽 L
            points_per_axis: 每个坐标轴的节点数 N
            center: 网格中心，默认原点
        """
        if dim not in (1, 2):
            raise ValueError(f"dim 必须是 1 或 2，得到 {dim}")
        if not (half_width > 0 and math.isfinite(half_width)):
            raise ValueError(f"half_width 必须是正数，得到 {half_width}")
        if int(points_per_axis) != points_per_axis or points_per_axis < GRID_CONFIG["min_points_per_axis"]:
            raise ValueError(f"points_per_axis 必须是不小于 {GRID_CONFIG['min_points_per_axis']} 的整数，"
                             f"得到 {points_per_axis}")

        self.dim = int(dim)
        self.half_width = float(half_width)
        self.points_per_axis = int(points_per_axis)
        if center is None:
            center = (0.0,) * self.dim
        center = tuple(float(c) for c in np.atleast_1d(center))
        if len(center) != self.dim:
            raise ValueError(f"center 的长度必须等于 dim={self.dim}，得到 {center}")
        self.center = center

        self.spacing = 2.0 * self.half_width / (self.points_per_axis - 1)
        index = np.arange(self.points_per_axis)
        self.axes = tuple(c + (-self.half_width + index * self.spacing) for c in self.center)

        axis_weights = np.full(self.points_per_axis, self.spacing)
        axis_weights[0] = axis_weights[-1] = self.spacing / 2.0
        weights = axis_weights
        for _ in range(self.dim - 1):
            weights = np.multiply.outer(weights, axis_weights)
        self.weights = weights.reshape(-1)
        self.weights.setflags(write=False)

        mesh = np.meshgrid(*self.axes, indexing="ij")
        self.nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
        self.nodes.setflags(write=False)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dim

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (self.dim == other.dim and self.half_width == other.half_width
                and self.points_per_axis == other.points_per_axis and self.center == other.center)

    def __hash__(self) -> int:
        return hash((self.dim, self.half_width, self.points_per_axis, self.center))

    def __repr__(self) -> str:
        return (f"GridSpec(dim={self.dim}, half_width={self.half_width}, "
                f"points_per_axis={self.points_per_axis}, center={self.center})")

    def check_same(self, other: "GridSpec") -> None:
        """不同网格时抛出 GridMismatchError"""
        if self != other:
            raise GridMismatchError(f"网格不一致: {self!r} 与 {other!r}")

    def header(self) -> str:
        """CSV文件的网格头，中心不在原点时追加 c=<c1>[,<c2>]"""
        text = f"# grid n={self.dim} L={self.half_width:.17g} N={self.points_per_axis}"
        if any(c != 0.0 for c in self.center):
            text += " c=" + ",".join(f"{c:.17g}" for c in self.center)
        return text

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "half_width": self.half_width,
            "points_per_axis": self.points_per_axis,
            "center": list(self.center),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridSpec":
        return cls(data["dim"], data["half_width"], data["points_per_axis"], data.get("center"))

    def row_blocks(self, block_rows: Optional[int] = None) -> Iterator[slice]:
        """按行分块遍历节点，控制成对求和的内存占用"""
        block = block_rows or QUADRATURE_CONFIG["block_rows"]
        for start in range(0, self.size, block):
            yield slice(start, min(start + block, self.size))

    def pair_distances(self, rows: slice) -> np.ndarray:
        """
        计算一块行节点到全部节点的距离

        对角线位置填入 inf，使 |x−y| 的负幂在对角线上自动为零。

        Args:
            rows: 行切片

        Returns:
            形状为 (行数, M) 的距离矩阵
        """
        dist = cdist(self.nodes[rows], self.nodes)
        local = np.arange(rows.stop - rows.start)
        dist[local, rows.start + local] = np.inf
        return dist

    def distance_matrix(self) -> np.ndarray:
        """全部节点对的距离矩阵（对角线为 inf）"""
        return self.pair_distances(slice(0, self.size))

    def boundary_mask(self) -> np.ndarray:
        """位于盒子边界上的节点"""
        index = np.indices(self.shape).reshape(self.dim, -1)
        last = self.points_per_axis - 1
        return np.any((index == 0) | (index == last), axis=0)

    def restrict(self, center: Sequence[float], half_width: float) -> Tuple["GridSpec", np.ndarray]:
        """
        取出落在子立方体内的节点，组成新的网格

        Args:
            center: 子立方体中心
            half_width: 子立方体半宽

        Returns:
            (子网格, 子网格节点在原网格中的展平下标)
        """
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if center.shape != (self.dim,):
            raise ValueError(f"子立方体中心的维数必须为 {self.dim}，得到 {center}")
        slack = 1e-12 * self.half_width
        per_axis = []
        for axis, c in zip(self.axes, center):
            inside = np.nonzero(np.abs(axis - c) <= half_width + slack)[0]
            if len(inside) < 4:
                raise ValueError(f"子立方体 center={center.tolist()} half_width={half_width} "
                                 f"每轴少于4个节点")
            per_axis.append(inside)

        count = len(per_axis[0])
        if any(len(a) != count for a in per_axis):
            raise ValueError("子立方体在各坐标轴上的节点数不一致")
        sub_center = [0.5 * (axis[a[0]] + axis[a[-1]]) for axis, a in zip(self.axes, per_axis)]
        sub = GridSpec(self.dim, 0.5 * (count - 1) * self.spacing, count, sub_center)
        index = np.ravel_multi_index(np.meshgrid(*per_axis, indexing="ij"), self.shape).reshape(-1)
        return sub, index

    def dilate(self, lam: float) -> "GridSpec":
        """λ 缩放后的网格：半宽 L/λ，节点数不变"""
        if not lam > 0:
            raise ValueError(f"缩放因子必须为正，得到 {lam}")
        return GridSpec(self.dim, self.half_width / lam, self.points_per_axis,
                        tuple(c / lam for c in self.center))


def make_grid(dim: int, half_width: float, points_per_axis: int,
              center: Optional[Sequence[float]] = None) -> GridSpec:
    """
    创建带梯形权重的均匀网格

    Args:
        dim: 空间维数 (1 或 2)
        half_width: 半宽 L
        points_per_axis: 每轴节点数 N
        center: 网格中心

    Returns:
        网格
    """
    grid = GridSpec(dim, half_width, points_per_axis, center)
    if points_per_axis < GRID_CONFIG["recommended_points_per_axis"]:
        logger.info(f"网格每轴只有 {points_per_axis} 个节点，只适合做最小示例")
    return grid


class FracParams:
    """
    指数组 (s, p, q, n)
    """

    def __init__(self, s: float, p: float, q: Optional[float] = None, n: int = 1):
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"s 必须在 [0, 1] 内，得到 {s}")
        if not p >= 1.0:
            raise ValueError(f"p 必须不小于 1，得到 {p}")
        if q is not None and not q > 1.0:
            raise ValueError(f"q 必须大于 1，得到 {q}")
        if n not in (1, 2):
            raise ValueError(f"n 必须是 1 或 2，得到 {n}")
        self.s = float(s)
        self.p = float(p)
        self.q = None if q is None else float(q)
        self.n = int(n)

    @property
    def regime(self) -> str:
        """sobolev (sp < n)，holder (sp > n)，或 critical"""
        sp = self.s * self.p
        if sp < self.n:
            return "sobolev"
        if sp > self.n:
            return "holder"
        return "critical"

    def sobolev_exponent(self) -> float:
        """满足 1/q = 1/p − s/n 的 q"""
        if self.regime != "sobolev":
            raise ValueError(f"sp={self.s * self.p} 不小于 n={self.n}，没有Sobolev嵌入指数")
        return 1.0 / (1.0 / self.p - self.s / self.n)

    def holder_alpha(self) -> float:
        """α = s − n/p"""
        alpha = self.s - self.n / self.p
        if not (self.regime == "holder" and 0.0 < alpha < 1.0):
            raise ValueError(f"(s, p, n)=({self.s}, {self.p}, {self.n}) 不在Hölder嵌入范围内")
        return alpha

    def check_sobolev(self) -> None:
        """检查 sp < n 且 1/q = 1/p − s/n"""
        if self.q is None:
            raise ValueError("Sobolev嵌入需要给定 q")
        expected = 1.0 / self.p - self.s / self.n
        if self.regime != "sobolev" or abs(1.0 / self.q - expected) > 1e-12:
            raise ValueError(f"指数组 (s={self.s}, p={self.p}, q={self.q}, n={self.n}) "
                             f"不满足 1/q = 1/p − s/n")

    def check_holder(self) -> None:
        self.holder_alpha()

    def to_dict(self) -> Dict[str, Any]:
        return {"s": self.s, "p": self.p, "q": self.q, "n": self.n}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FracParams":
        return cls(data["s"], data["p"], data.get("q"), data.get("n", 1))

    def __repr__(self) -> str:
        return f"FracParams(s={self.s}, p={self.p}, q={self.q}, n={self.n})"


MOLLIFIER_SHAPES = ("gaussian", "bump")


def bump_profile(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _bump_mass(dim: int) -> float:
    """未归一化鼓包的积分"""
    if dim == 1:
        value, _ = integrate.quad(lambda x: float(bump_profile(np.array(abs(x)))), -1.0, 1.0,
                                  epsabs=1e-14, epsrel=1e-13)
        return value
    value, _ = integrate.quad(lambda r: r * float(bump_profile(np.array(r))), 0.0, 1.0,
                              epsabs=1e-14, epsrel=1e-13)
    return 2.0 * math.pi * value


class Mollifier:
    """
    单位质量的磨光核 φ_ε(x) = ε^{−n} φ(x/ε)

    φ 为高斯 π^{−n/2} e^{−|x|²} 或归一化的紧支鼓包 exp(−1/(1−|x|²))。
    """

    def __init__(self, shape: str, epsilon: float, dim: int = 1):
        if shape not in MOLLIFIER_SHAPES:
            raise ValueError(f"未知的磨光核形状: {shape}")
        if not epsilon > 0:
            raise ValueError(f"epsilon 必须为正，得到 {epsilon}")
        if dim not in (1, 2):
            raise ValueError(f"dim 必须是 1 或 2，得到 {dim}")
        self.shape = shape
        self.epsilon = float(epsilon)
        self.dim = int(dim)

        mass = self.mass()
        if abs(mass - 1.0) > 1e-10:
            raise ValueError(f"磨光核质量为 {mass}，不是单位质量")

    def profile(self, r: np.ndarray) -> np.ndarray:
        """未缩放的径向轮廓 φ(r)"""
        r = np.asarray(r, dtype=float)
        if self.shape == "gaussian":
            return math.pi ** (-self.dim / 2.0) * np.exp(-r ** 2)
        return bump_profile(r) / _bump_mass(self.dim)

    def kernel(self, r: np.ndarray) -> np.ndarray:
        """φ_ε 在距离 r 处的值"""
        return self.epsilon ** (-self.dim) * self.profile(np.asarray(r, dtype=float) / self.epsilon)

    def mass(self) -> float:
        """用自适应求积计算 ∫ φ_ε"""
        reach = self.support_radius()
        if self.dim == 1:
            value, _ = integrate.quad(lambda x: float(self.kernel(abs(x))), -reach, reach,
                                      points=[0.0], epsabs=1e-14, epsrel=1e-13, limit=200)
            return value
        value, _ = integrate.quad(lambda r: r * float(self.kernel(r)), 0.0, reach,
                                  epsabs=1e-14, epsrel=1e-13, limit=200)
        return 2.0 * math.pi * value

    def support_radius(self) -> float:
        """核的数值支撑半径：鼓包为 ε，高斯为核值降到可忽略时的半径"""
        if self.shape == "bump":
            return self.epsilon
        return self.epsilon * math.sqrt(-math.log(QUADRATURE_CONFIG["kernel_negligible"]))

    def to_dict(self) -> Dict[str, Any]:
        return {"shape": self.shape, "epsilon": self.epsilon, "dim": self.dim}

    def __repr__(self) -> str:
        return f"Mollifier(shape={self.shape!r}, epsilon={self.epsilon}, dim={self.dim})"
