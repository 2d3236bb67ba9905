"""
奇异核的格点求积修正和盒外闭合

挖去对角线的梯形和在 z = 0 附近的被积函数形如 A·|z|^{−σ} 时，广义Euler–Maclaurin展开给出
    ∫ f ≈ h^n ∑_{z≠0} f(z) − A·Z_n(σ)·h^{n−σ}
其中 Z_1(σ) = 2ζ(σ)，Z_2(σ) = 4ζ(σ/2)β(σ/2) 是解析延拓的格点zeta函数。
"""
import logging
import math
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import ndimage

from config import QUADRATURE_CONFIG
from fields.field import ScalarField
from fields.grid import GridSpec

logger = logging.getLogger("fracbench.operators")

# 步长 h 和 2h 的二阶差分模板，常数上逐位为零
_NEAR_DIFFERENCE = np.array([1.0, -2.0, 1.0])
_FAR_DIFFERENCE = np.array([1.0, 0.0, -2.0, 0.0, 1.0])


@lru_cache(maxsize=None)
def lattice_zeta(dim: int, sigma: float) -> float:
    """
    ∑_{z∈ℤⁿ, z≠0} |z|^{−σ} 的解析延拓

    Args:
        dim: 维数 (1 或 2)
        sigma: 指数，不能等于 dim（极点）

    Returns:
        Z_n(σ)
    """
    if dim == 1:
        if sigma == 1.0:
            raise ValueError("σ = 1 是一维格点zeta函数的极点")
        return float(2 * mpmath.zeta(sigma))
    if dim == 2:
        if sigma == 2.0:
            raise ValueError("σ = 2 是二维格点zeta函数的极点")
        t = sigma / 2.0
        return float(4 * mpmath.zeta(t) * mpmath.dirichlet(t, [0, 1, 0, -1]))
    raise ValueError(f"dim 必须是 1 或 2，得到 {dim}")


def singular_correction(grid: GridSpec, amplitude: np.ndarray, sigma: float) -> np.ndarray:
    """−A·Z_n(σ)·h^{n−σ}，逐节点"""
    return -amplitude * lattice_zeta(grid.dim, float(sigma)) * grid.spacing ** (grid.dim - sigma)


def discrete_laplacian(u: ScalarField) -> np.ndarray:
    """四阶差分的 Δu = (16·δ_h − δ_{2h})/(12h²)，边界外按最近节点延拓"""
    grid = u.grid
    arr = u.as_grid_array()
    out = np.zeros_like(arr)
    for axis in range(grid.dim):
        near = ndimage.correlate1d(arr, _NEAR_DIFFERENCE, axis=axis, mode="nearest")
        far = ndimage.correlate1d(arr, _FAR_DIFFERENCE, axis=axis, mode="nearest")
        out += 16.0 * near - far
    return out.reshape(-1) / (12.0 * grid.spacing ** 2)


def gradient_components(u: ScalarField) -> np.ndarray:
    """∇u 的各分量，形状 (n, M)"""
    grid = u.grid
    arr = u.as_grid_array()
    if grid.points_per_axis < 3:
        return np.zeros((grid.dim, grid.size))
    parts = np.gradient(arr, grid.spacing, edge_order=2)
    if grid.dim == 1:
        parts = [parts]
    return np.stack([g.reshape(-1) for g in parts])


def divergence_correction(u: ScalarField, total_order: float) -> np.ndarray:
    """
    div_s d_{s'} u 的对角线修正，total_order = s + s'

    偶部被积函数 ≈ −(Δu/n)·|z|^{−σ}，σ = n + s + s' − 2。
    """
    grid = u.grid
    sigma = grid.dim + total_order - 2.0
    if sigma >= grid.dim:
        logger.warning(f"s + s' = {total_order} 时对角线奇异性不可积，跳过修正")
        return np.zeros(grid.size)
    amplitude = -discrete_laplacian(u) / grid.dim
    return singular_correction(grid, amplitude, sigma)


def gradient_energy_correction(u: ScalarField, s: float, p: float) -> np.ndarray:
    """
    ∑_j |d_s u|^p w_j/|z|^n 的对角线修正

    一维时被积函数 ≈ |u'|^p·|z|^{−σ}，σ = n + sp − p；
    二维只对 p = 2 修正，此时 A = |∇u|²/2。
    """
    grid = u.grid
    sigma = grid.dim + s * p - p
    if sigma >= grid.dim:
        logger.warning(f"s = {s} 时差商的对角线奇异性不可积，跳过修正")
        return np.zeros(grid.size)
    gradient = gradient_components(u)
    if grid.dim == 1:
        amplitude = np.abs(gradient[0]) ** p
    elif p == 2.0:
        amplitude = np.sum(gradient ** 2, axis=0) / 2.0
    else:
        logger.warning(f"二维 p = {p} 的格点修正未实现，返回未修正的和")
        return np.zeros(grid.size)
    return singular_correction(grid, amplitude, sigma)


def trace_is_negligible(u: ScalarField) -> bool:
    """边界上的值是否低于 exterior_trace_tol·max|u|"""
    peak = float(np.max(np.abs(u.values)))
    if peak == 0.0:
        return True
    boundary = float(np.max(np.abs(u.values[u.grid.boundary_mask()])))
    return boundary <= QUADRATURE_CONFIG["exterior_trace_tol"] * peak


def exterior_mass(grid: GridSpec, exponent: float) -> np.ndarray:
    """
    ∫_{y∉盒子} |x−y|^{−exponent} dy，逐节点

    一维为闭式；二维对到边界的射线距离做角向Gauss–Legendre积分。距离下限取 h/2。

    Args:
        grid: 网格
        exponent: 核的指数，必须大于 n

    Returns:
        形状为 (M,) 的数组
    """
    n = grid.dim
    if exponent <= n:
        raise ValueError(f"指数 {exponent} 不大于维数 {n}，盒外积分发散")
    floor = grid.spacing / 2.0
    offset = grid.nodes - np.asarray(grid.center)
    L = grid.half_width

    if n == 1:
        right = np.maximum(L - offset[:, 0], floor)
        left = np.maximum(L + offset[:, 0], floor)
        return (right ** (1.0 - exponent) + left ** (1.0 - exponent)) / (exponent - 1.0)

    nodes, weights = leggauss(QUADRATURE_CONFIG["exterior_angular_nodes"])
    theta = math.pi * (nodes + 1.0)
    weights = math.pi * weights
    direction = np.stack([np.cos(theta), np.sin(theta)])
    reach = np.full((grid.size, len(theta)), np.inf)
    for axis in range(2):
        d = direction[axis][None, :]
        x = offset[:, axis][:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(d > 0, (L - x) / d, np.where(d < 0, (L + x) / -d, np.inf))
        reach = np.minimum(reach, t)
    reach = np.maximum(reach, floor)
    return (reach ** (2.0 - exponent) / (exponent - 2.0)) @ weights


def exterior_term(u: ScalarField, total_order: float) -> np.ndarray:
    """
    u 在盒外取零时，盒外区域对 div_s d_{s'} u 的贡献 2u(x)·exterior_mass

    边界迹不可忽略时（例如常数）算子限制在盒内，返回零。
    """
    grid = u.grid
    exponent = grid.dim + total_order
    if exponent <= grid.dim or not trace_is_negligible(u):
        return np.zeros(grid.size)
    return 2.0 * u.values * exterior_mass(grid, exponent)
