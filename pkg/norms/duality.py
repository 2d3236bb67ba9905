"""
H^{−1/2}_od 的对偶下界、L¹_od + H^{−1/2}_od 和空间的上界，以及 W^{−s,p}_od 的代表元范数
"""
import logging
import math
from typing import List, Sequence, Tuple

from fields.field import ScalarField, OffDiagonalField, pair_od
from fields.grid import Mollifier
from norms.lebesgue import lp_norm, lp_od_norm, best_constant_shift
from operators.gradient import frac_gradient, frac_divergence
from operators.mollify import mollify_scalar

logger = logging.getLogger("fracbench.norms")

HALF = 0.5


def dual_hminushalf_estimate(u: ScalarField, g_family: Sequence[OffDiagonalField]) -> float:
    """
    ‖d_{1/2}u‖_{H^{−1/2}_od} 的下界 max_G |⟨d_{1/2}u, G⟩|/‖div_{1/2}G‖_{L²}

    div_{1/2}G 为零的测试场被跳过。

    Args:
        u: 标量场
        g_family: 对角线平坦的非对角测试场

    Returns:
        下界估计
    """
    if not g_family:
        raise ValueError("测试场族为空")
    du = frac_gradient(u, HALF)
    best = None
    for G in g_family:
        denominator = lp_norm(frac_divergence(G, HALF), 2.0)
        if denominator == 0.0:
            continue
        value = abs(pair_od(du, G)) / denominator
        best = value if best is None else max(best, value)
    if best is None:
        raise ValueError("测试场族中所有 div_{1/2} G 都为零")
    return best


def wsp_od_norm(u: ScalarField, p: float) -> float:
    """‖d_s u‖_{W^{−s,p}_od} = ‖u − c*‖_{L^p}，与 s 无关"""
    return best_constant_shift(u, p)[1]


def sum_space_decompositions(u: ScalarField, epsilons: Sequence[float],
                             kernel: str = "gaussian") -> List[Tuple[float, float, float]]:
    """
    磨光分解 d_{1/2}u = d_{1/2}(u − u_ε) + d_{1/2}u_ε 的两部分范数

    ε = 0 对应纯 H^{−1/2} 分解，ε = ∞ 对应纯 L¹_od 分解，两者总在列表中。

    Returns:
        [(ε, ‖d_{1/2}(u − u_ε)‖_{L¹_od}, ‖u_ε − c*‖_{L²}), ...]
    """
    rows = [(0.0, 0.0, best_constant_shift(u, 2.0)[1])]
    for eps in epsilons:
        smooth = mollify_scalar(u, Mollifier(kernel, eps, u.grid.dim))
        rough = lp_od_norm(frac_gradient(u - smooth, HALF), 1.0)
        rows.append((float(eps), rough, best_constant_shift(smooth, 2.0)[1]))
    rows.append((math.inf, lp_od_norm(frac_gradient(u, HALF), 1.0), 0.0))
    return rows


def sum_space_upper(u: ScalarField, epsilons: Sequence[float],
                    kernel: str = "gaussian") -> Tuple[float, float]:
    """
    ‖d_{1/2}u‖_{L¹_od + H^{−1/2}_od} 在磨光分解族上的上界

    Args:
        u: 标量场
        epsilons: 磨光尺度列表，非空
        kernel: 磨光核形状

    Returns:
        (上界, 取到上界的 ε)，ε 可以是 0.0 或 inf
    """
    if not epsilons:
        raise ValueError("epsilon 列表为空")
    rows = sum_space_decompositions(u, epsilons, kernel)
    best_eps, best_value = rows[0][0], rows[0][1] + rows[0][2]
    for eps, rough, smooth in rows[1:]:
        if rough + smooth < best_value:
            best_eps, best_value = eps, rough + smooth
    logger.debug(f"和空间上界 {best_value:.6g} 在 epsilon={best_eps} 处取到")
    return best_value, best_eps
