"""
解析标量测试函数
"""
import math
from typing import Dict, Any, Tuple, Union

import numpy as np

from fields.field import ScalarField
from fields.grid import GridSpec, bump_profile

# 每种函数的参数及默认值
SCALAR_KINDS = {
    "gaussian": {"center": 0.0, "width": 1.0, "amplitude": 1.0},
    "poly_gaussian": {"degree": 1, "width": 1.0},
    "bump": {"center": 0.0, "radius": 1.0},
    "indicator": {"interval": (-1.0, 1.0)},
    "constant": {"c": 0.0},
    "linear": {},
}

# 光滑且快速衰减（或紧支）的函数
SCHWARTZ_KINDS = ("gaussian", "poly_gaussian", "bump")


def _as_point(value: Union[float, Tuple[float, ...]], dim: int) -> np.ndarray:
    point = np.atleast_1d(np.asarray(value, dtype=float))
    if point.size == 1:
        return np.full(dim, point[0])
    if point.size != dim:
        raise ValueError(f"中心点的维数 {point.size} 与网格维数 {dim} 不一致")
    return point


class ScalarFnSpec:
    """
    标量测试函数的描述：种类加参数
    """

    def __init__(self, kind: str, **params):
        if kind not in SCALAR_KINDS:
            raise ValueError(f"未知的标量函数种类: {kind}")
        unknown = set(params) - set(SCALAR_KINDS[kind])
        if unknown:
            raise ValueError(f"{kind} 不接受参数: {', '.join(sorted(unknown))}")
        merged = dict(SCALAR_KINDS[kind])
        merged.update(params)

        if kind in ("gaussian", "poly_gaussian") and not merged["width"] > 0:
            raise ValueError(f"width 必须为正，得到 {merged['width']}")
        if kind == "bump" and not merged["radius"] > 0:
            raise ValueError(f"radius 必须为正，得到 {merged['radius']}")
        if kind == "poly_gaussian" and (int(merged["degree"]) != merged["degree"] or merged["degree"] < 0):
            raise ValueError(f"degree 必须是非负整数，得到 {merged['degree']}")
        if kind == "indicator":
            lo, hi = merged["interval"]
            if not lo < hi:
                raise ValueError(f"区间端点必须满足 lo < hi，得到 {merged['interval']}")
            merged["interval"] = (float(lo), float(hi))

        self.kind = kind
        self.params = merged

    @property
    def is_schwartz(self) -> bool:
        return self.kind in SCHWARTZ_KINDS

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        在给定点上精确求值

        Args:
            points: 形状为 (M, n) 的点

        Returns:
            形状为 (M,) 的函数值
        """
        points = np.asarray(points, dtype=float)
        dim = points.shape[1]
        p = self.params
        if self.kind == "gaussian":
            r2 = np.sum((points - _as_point(p["center"], dim)) ** 2, axis=1)
            return p["amplitude"] * np.exp(-r2 / p["width"] ** 2)
        if self.kind == "poly_gaussian":
            r2 = np.sum(points ** 2, axis=1)
            return points[:, 0] ** int(p["degree"]) * np.exp(-r2 / p["width"] ** 2)
        if self.kind == "bump":
            r = np.sqrt(np.sum((points - _as_point(p["center"], dim)) ** 2, axis=1)) / p["radius"]
            return bump_profile(r)
        if self.kind == "indicator":
            lo, hi = p["interval"]
            return np.all((points > lo) & (points < hi), axis=1).astype(float)
        if self.kind == "constant":
            return np.full(len(points), float(p["c"]))
        return points[:, 0].copy()

    def l2_norm_squared(self, dim: int = 1) -> float:
        """‖u‖²_{L²(ℝⁿ)} 的解析值（仅高斯）"""
        if self.kind != "gaussian":
            raise ValueError(f"{self.kind} 没有实现解析 L² 范数")
        p = self.params
        return p["amplitude"] ** 2 * (p["width"] ** 2 * math.pi / 2.0) ** (dim / 2.0)

    def to_dict(self) -> Dict[str, Any]:
        params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.params.items()}
        return {"kind": self.kind, **params}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScalarFnSpec":
        data = dict(data)
        kind = data.pop("kind")
        if "interval" in data:
            data["interval"] = tuple(data["interval"])
        if "center" in data and isinstance(data["center"], list):
            data["center"] = tuple(data["center"])
        return cls(kind, **data)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({args})"


def sample_scalar(spec: ScalarFnSpec, grid: GridSpec, dilation: float = 1.0) -> ScalarField:
    """
    在网格节点上采样 u(λx)

    Args:
        spec: 函数描述
        grid: 网格
        dilation: 缩放因子 λ，默认1

    Returns:
        标量场
    """
    return ScalarField(grid, spec.evaluate(dilation * grid.nodes))
