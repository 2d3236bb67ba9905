"""
标量场和非对角场的磨光
"""
import logging
from typing import List, Tuple

import numpy as np
from scipy import signal

from config import QUADRATURE_CONFIG
from fields.field import ScalarField, OffDiagonalField
from fields.grid import GridSpec, Mollifier

logger = logging.getLogger("fracbench.operators")


def _check(grid: GridSpec, m: Mollifier) -> None:
    if m.dim != grid.dim:
        raise ValueError(f"磨光核维数 {m.dim} 与网格维数 {grid.dim} 不一致")
    if m.epsilon < QUADRATURE_CONFIG["mollifier_min_resolution"] * grid.spacing:
        logger.warning(f"epsilon={m.epsilon} 小于 2h={2 * grid.spacing}，磨光核分辨不足")


def offset_kernel(grid: GridSpec, m: Mollifier) -> np.ndarray:
    """
    φ_ε 在偏移格点 k·h (|k_a| ≤ N−1) 上的值，形状 (2N−1,)*n，中心对应零偏移
    """
    k = np.arange(-(grid.points_per_axis - 1), grid.points_per_axis) * grid.spacing
    mesh = np.meshgrid(*([k] * grid.dim), indexing="ij")
    r = np.sqrt(sum(axis ** 2 for axis in mesh))
    return m.kernel(r)


def mollify_scalar(u: ScalarField, m: Mollifier) -> ScalarField:
    """
    u_ε = φ_ε ∗ u，逐节点按离散核质量归一化

    u_ε(x_i) = ∑_k φ_ε(x_i − x_k) w_k u_k / ∑_k φ_ε(x_i − x_k) w_k，常数保持不变。

    Args:
        u: 标量场
        m: 磨光核

    Returns:
        磨光后的标量场
    """
    grid = u.grid
    _check(grid, m)
    kernel = offset_kernel(grid, m)
    w = grid.weights.reshape(grid.shape)
    numerator = signal.convolve(u.as_grid_array() * w, kernel, mode="same", method="direct")
    mass = signal.convolve(w, kernel, mode="same", method="direct")
    return ScalarField(grid, numerator / mass)


def od_kernel_weights(grid: GridSpec, m: Mollifier) -> List[Tuple[Tuple[int, ...], float]]:
    """
    非对角磨光使用的偏移及权重 c_k = φ_ε(kh)·h^n / ∑ φ_ε(k'h)·h^n

    低于 kernel_negligible·max 的权重不参与求和。
    """
    _check(grid, m)
    kernel = offset_kernel(grid, m) * grid.spacing ** grid.dim
    kernel = kernel / np.sum(kernel)
    keep = kernel > QUADRATURE_CONFIG["kernel_negligible"] * np.max(kernel)
    center = grid.points_per_axis - 1
    return [(tuple(int(i) - center for i in index), float(kernel[index]))
            for index in zip(*np.nonzero(keep))]


def kernel_l1_norm(grid: GridSpec, m: Mollifier) -> float:
    """离散核的 ‖c‖_{ℓ¹}"""
    return float(sum(abs(c) for _, c in od_kernel_weights(grid, m)))


def _shift_slices(offset: Tuple[int, ...], size: int) -> Tuple[Tuple[slice, ...], Tuple[slice, ...]]:
    dst, src = [], []
    for k in offset:
        if k >= 0:
            dst.append(slice(k, size))
            src.append(slice(0, size - k))
        else:
            dst.append(slice(0, size + k))
            src.append(slice(-k, size))
    return tuple(dst), tuple(src)


def mollify_od(F: OffDiagonalField, m: Mollifier) -> OffDiagonalField:
    """
    对角卷积 (φ_ε ∗ F)(x, y) = ∫ φ_ε(z) F(x−z, y−z) dz

    两个变量平移同一个 z，盒外补零，不逐对归一化。结果在对角线上为 0，且逐位反对称。

    Args:
        F: 非对角场
        m: 磨光核

    Returns:
        磨光后的非对角场（不带来源信息）
    """
    grid = F.grid
    shape = grid.shape
    F4 = F.values.reshape(shape + shape)
    out4 = np.zeros_like(F4)
    for offset, c in od_kernel_weights(grid, m):
        dst, src = _shift_slices(offset, grid.points_per_axis)
        out4[dst + dst] += c * F4[src + src]
    return OffDiagonalField(grid, out4.reshape(grid.size, grid.size))


def interior_grid(grid: GridSpec, m: Mollifier):
    """
    离边界超过核数值半径的节点组成的子网格

    Returns:
        (子网格, 下标)
    """
    half_width = grid.half_width - m.support_radius()
    if half_width <= 0:
        raise ValueError(f"磨光核半径 {m.support_radius()} 不小于网格半宽 {grid.half_width}")
    return grid.restrict(grid.center, half_width)
