"""
非对角测试场：对角线附近平坦的反对称函数
"""
import math
from typing import Dict, Any, Union

import numpy as np

from fields.field import OffDiagonalField, odd_from_upper
from fields.grid import GridSpec
from testlib.scalar_functions import ScalarFnSpec

OD_KINDS = {
    "disjoint_bumps": ("b", "c"),
    "cutoff_gradient": ("u", "s", "delta"),
    "gaussian_pair": ("g1", "g2", "delta"),
}


def _smooth_step_part(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    positive = t > 0
    out[positive] = np.exp(-1.0 / t[positive] ** 2)
    return out


def eta(t: np.ndarray) -> np.ndarray:
    """
    光滑截断因子：t = 0 处各阶导数为零，t ≥ 1 时恒为 1

    由 exp(−1/t²) 拼接而成：η(t) = f(t)/(f(t) + f(1−t))。
    """
    t = np.asarray(t, dtype=float)
    out = np.ones_like(t)
    low = t < 1.0
    tl = t[low]
    f0 = _smooth_step_part(tl)
    f1 = _smooth_step_part(1.0 - tl)
    out[low] = f0 / (f0 + f1)
    return out


def _as_scalar_spec(value: Union[ScalarFnSpec, Dict[str, Any]]) -> ScalarFnSpec:
    if isinstance(value, ScalarFnSpec):
        return value
    return ScalarFnSpec.from_dict(value)


class OdFnSpec:
    """
    非对角测试场的描述

    disjoint_bumps(b, c): b(x)c(y) − b(y)c(x)，两个鼓包支集不相交；
    cutoff_gradient(u, s, delta): d_s u(x,y)·η(|x−y|/δ)；
    gaussian_pair(g1, g2, delta): (g1(x)g2(y) − g1(y)g2(x))·η(|x−y|/δ)。
    """

    def __init__(self, kind: str, **params):
        if kind not in OD_KINDS:
            raise ValueError(f"未知的非对角场种类: {kind}")
        missing = set(OD_KINDS[kind]) - set(params)
        extra = set(params) - set(OD_KINDS[kind])
        if missing or extra:
            raise ValueError(f"{kind} 需要参数 {', '.join(OD_KINDS[kind])}")
        self.kind = kind
        self.params = dict(params)

        if kind == "disjoint_bumps":
            b = self.params["b"] = _as_scalar_spec(params["b"])
            c = self.params["c"] = _as_scalar_spec(params["c"])
            if b.kind != "bump" or c.kind != "bump":
                raise ValueError("disjoint_bumps 的两个分量都必须是鼓包")
            if self.support_gap() <= 0:
                raise ValueError(f"鼓包支集重叠: {b} 与 {c}")
        elif kind == "cutoff_gradient":
            self.params["u"] = _as_scalar_spec(params["u"])
            if not 0.0 <= params["s"] <= 1.0:
                raise ValueError(f"s 必须在 [0, 1] 内，得到 {params['s']}")
        else:
            self.params["g1"] = _as_scalar_spec(params["g1"])
            self.params["g2"] = _as_scalar_spec(params["g2"])
        if "delta" in self.params and not self.params["delta"] > 0:
            raise ValueError(f"delta 必须为正，得到 {self.params['delta']}")

    def support_gap(self) -> float:
        """两个鼓包支集之间的距离"""
        b, c = self.params["b"].params, self.params["c"].params
        centers = np.broadcast_arrays(np.atleast_1d(b["center"]), np.atleast_1d(c["center"]))
        distance = float(np.linalg.norm(centers[0] - centers[1]))
        return distance - b["radius"] - c["radius"]

    def evaluate(self, grid: GridSpec) -> np.ndarray:
        """在全部节点对上求值，返回 (M, M) 的反对称矩阵"""
        nodes = grid.nodes
        if self.kind == "disjoint_bumps":
            bx = self.params["b"].evaluate(nodes)
            cx = self.params["c"].evaluate(nodes)
            return odd_from_upper(np.outer(bx, cx) - np.outer(cx, bx))

        dist = grid.distance_matrix()
        cutoff = eta(dist / self.params["delta"])
        if self.kind == "cutoff_gradient":
            ux = self.params["u"].evaluate(nodes)
            raw = (ux[:, None] - ux[None, :]) / dist ** self.params["s"] * cutoff
        else:
            g1 = self.params["g1"].evaluate(nodes)
            g2 = self.params["g2"].evaluate(nodes)
            raw = (np.outer(g1, g2) - np.outer(g2, g1)) * cutoff
        return odd_from_upper(raw)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind}
        for key, value in self.params.items():
            out[key] = value.to_dict() if isinstance(value, ScalarFnSpec) else value
        return out

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OdFnSpec":
        data = dict(data)
        kind = data.pop("kind")
        return cls(kind, **data)

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({args})"


def sample_od(spec: OdFnSpec, grid: GridSpec) -> OffDiagonalField:
    """
    在网格节点对上采样非对角测试场

    Args:
        spec: 场描述
        grid: 网格

    Returns:
        非对角场
    """
    return OffDiagonalField(grid, spec.evaluate(grid))


def bump_pair_family(count: int, radius: float = 0.5, spread: float = 6.0) -> list:
    """
    生成 count 个支集不相交的鼓包对，中心在 [−spread, spread] 上排开

    Args:
        count: 鼓包对的数目
        radius: 鼓包半径
        spread: 中心所在区间的半宽

    Returns:
        OdFnSpec 列表
    """
    if count < 1:
        raise ValueError(f"count 必须为正，得到 {count}")
    slots = max(2, int(math.ceil(math.sqrt(2 * count))) + 1)
    centers = np.linspace(-spread, spread, slots)
    specs = []
    for i in range(slots):
        for j in range(i + 1, slots):
            if len(specs) == count:
                return specs
            if abs(centers[j] - centers[i]) <= 2 * radius:
                continue
            specs.append(OdFnSpec(
                "disjoint_bumps",
                b=ScalarFnSpec("bump", center=float(centers[i]), radius=radius),
                c=ScalarFnSpec("bump", center=float(centers[j]), radius=radius),
            ))
    if len(specs) < count:
        raise ValueError(f"无法在 [−{spread}, {spread}] 上放下 {count} 个不相交的鼓包对")
    return specs
