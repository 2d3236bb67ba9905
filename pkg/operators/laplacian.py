"""
分数拉普拉斯的两种实现：奇异积分（div_s d_s u 的融合形式）和傅里叶乘子
"""
import itertools
import logging
import math
from typing import Dict, Iterator, Optional, Tuple

import numpy as np
from scipy import fft, special

from config import QUADRATURE_CONFIG
from fields.field import ScalarField
from fields.grid import GridSpec
from operators.quadrature import divergence_correction, exterior_term

logger = logging.getLogger("fracbench.operators")


def _half_space_offsets(grid: GridSpec) -> Iterator[Tuple[int, ...]]:
    """字典序为正的非零格点偏移，每对 ±k 只取一个"""
    span = range(-(grid.points_per_axis - 1), grid.points_per_axis)
    for k in itertools.product(span, repeat=grid.dim):
        first = next((c for c in k if c != 0), 0)
        if first > 0:
            yield k


def _shifted(arr: np.ndarray, offset: Tuple[int, ...]) -> np.ndarray:
    """out[i] = arr[i + k]，越界处补零"""
    size = arr.shape[0]
    out = np.zeros_like(arr)
    dst, src = [], []
    for k in offset:
        if k >= 0:
            dst.append(slice(0, size - k))
            src.append(slice(k, size))
        else:
            dst.append(slice(-k, size))
            src.append(slice(0, size + k))
    out[tuple(dst)] = arr[tuple(src)]
    return out


def frac_laplacian_integral(u: ScalarField, s: float) -> ScalarField:
    """
    div_s d_s u 的融合求值

    对每对对称偏移 ±z 累加 2[(u_i − u_{i+z})w_{i+z} + (u_i − u_{i−z})w_{i−z}]/|z|^{n+2s}，
    奇数阶主奇异项在配对中抵消；再加上对角线格点修正和盒外闭合。

    Args:
        u: 标量场
        s: 阶数，取值 (0, 1)

    Returns:
        标量场
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s 必须在 (0, 1) 内，得到 {s}")
    grid = u.grid
    arr = u.as_grid_array()
    w = grid.weights.reshape(grid.shape)
    out = np.zeros(grid.shape)
    for offset in _half_space_offsets(grid):
        z = grid.spacing * math.sqrt(sum(k * k for k in offset))
        minus = tuple(-k for k in offset)
        pair = (arr - _shifted(arr, offset)) * _shifted(w, offset) \
            + (arr - _shifted(arr, minus)) * _shifted(w, minus)
        out += 2.0 * pair / z ** (grid.dim + 2.0 * s)

    values = out.reshape(-1)
    values = values + divergence_correction(u, 2.0 * s) + exterior_term(u, 2.0 * s)
    return ScalarField(grid, values)


class SpectralPlan:
    """
    零填充周期延拓上的傅里叶乘子 |2πk|^{2s}

    零频乘子恰为 0。构造后不可变，可在线程间共享。
    """

    def __init__(self, grid: GridSpec, s: float, padding: Optional[int] = None):
        """
        初始化谱计划

        Args:
            grid: 网格
            s: 阶数，取值 (0, 1]
            padding: 零填充倍数，默认取 QUADRATURE_CONFIG["spectral_padding"]
        """
        if not 0.0 < s <= 1.0:
            raise ValueError(f"s 必须在 (0, 1] 内，得到 {s}")
        padding = padding or QUADRATURE_CONFIG["spectral_padding"]
        if int(padding) != padding or padding < 1:
            raise ValueError(f"padding 必须是正整数，得到 {padding}")
        self.grid = grid
        self.s = float(s)
        self.exponent = 2.0 * self.s
        self.padding = int(padding)
        self.padded_points = self.padding * grid.points_per_axis

        k = 2.0 * math.pi * fft.fftfreq(self.padded_points, d=grid.spacing)
        mesh = np.meshgrid(*([k] * grid.dim), indexing="ij")
        squared = sum(axis ** 2 for axis in mesh)
        multiplier = squared ** self.s
        multiplier[(0,) * grid.dim] = 0.0
        multiplier.setflags(write=False)
        self.multiplier = multiplier

    def boundary_excess(self, u: ScalarField) -> float:
        """边界最大值相对全局最大值的比例"""
        peak = float(np.max(np.abs(u.values)))
        if peak == 0.0:
            return 0.0
        return float(np.max(np.abs(u.values[self.grid.boundary_mask()]))) / peak

    def apply(self, u: ScalarField) -> ScalarField:
        self.grid.check_same(u.grid)
        excess = self.boundary_excess(u)
        if excess > QUADRATURE_CONFIG["spectral_boundary_tol"]:
            logger.warning(f"边界值为最大值的 {excess:.3g} 倍，谱方法的周期化误差不可忽略")

        padded = np.zeros((self.padded_points,) * self.grid.dim)
        window = (slice(0, self.grid.points_per_axis),) * self.grid.dim
        padded[window] = u.as_grid_array()
        result = fft.ifftn(fft.fftn(padded) * self.multiplier).real
        return ScalarField(self.grid, result[window])


def frac_laplacian_spectral(u: ScalarField, s: float, padding: Optional[int] = None) -> ScalarField:
    """(−Δ)^s u 的傅里叶乘子实现"""
    return SpectralPlan(u.grid, s, padding).apply(u)


def singular_integral_constant(n: int, s: float) -> float:
    """C(n, s) = 4^s Γ(n/2 + s) / (π^{n/2} |Γ(−s)|)"""
    if not 0.0 < s < 1.0:
        raise ValueError(f"s 必须在 (0, 1) 内，得到 {s}")
    return 4.0 ** s * special.gamma(n / 2.0 + s) / (math.pi ** (n / 2.0) * abs(special.gamma(-s)))


def kappa_theory(n: int, s: float) -> float:
    """div_s d_s u 与乘子 |2πξ|^{2s} 之间的理论比例 2/C(n, s)"""
    return 2.0 / singular_integral_constant(n, s)


def fit_proportionality(numerator: ScalarField, denominator: ScalarField,
                        trust_fraction: float) -> Dict[str, float]:
    """
    比值场 numerator/denominator 在可信区域上的均值和相对标准差

    可信区域为 |denominator| > trust_fraction·max|denominator| 的节点。

    Returns:
        {"kappa", "relative_std", "trusted_nodes"}
    """
    numerator.grid.check_same(denominator.grid)
    magnitude = np.abs(denominator.values)
    peak = float(np.max(magnitude))
    if peak == 0.0:
        return {"kappa": float("nan"), "relative_std": float("nan"), "trusted_nodes": 0}
    trusted = magnitude > trust_fraction * peak
    ratio = numerator.values[trusted] / denominator.values[trusted]
    kappa = float(np.mean(ratio))
    return {
        "kappa": kappa,
        "relative_std": float(np.std(ratio) / abs(kappa)),
        "trusted_nodes": int(np.count_nonzero(trusted)),
    }
