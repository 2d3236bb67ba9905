"""
分数梯度 d_s 和分数散度 div_s
"""
import logging

import numpy as np

from fields.field import ScalarField, OffDiagonalField, odd_from_upper
from operators.quadrature import divergence_correction, exterior_term

logger = logging.getLogger("fracbench.operators")


def _check_order(s: float) -> None:
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s 必须在 [0, 1] 内，得到 {s}")


def frac_gradient(u: ScalarField, s: float) -> OffDiagonalField:
    """
    d_s u(x,y) = (u(x) − u(y))/|x−y|^s

    Args:
        u: 标量场
        s: 阶数，取值 [0, 1]

    Returns:
        记录了来源 (u, s) 的非对角场
    """
    _check_order(s)
    dist = u.grid.distance_matrix()
    raw = (u.values[:, None] - u.values[None, :]) / dist ** s
    return OffDiagonalField(u.grid, odd_from_upper(raw), source=u, order=s)


def frac_divergence(G: OffDiagonalField, s: float) -> ScalarField:
    """
    div_s G(x_i) = ∑_{j≠i} 2·G(i,j)/|x_i − x_j|^{n+s}·w_j

    G 来自 frac_gradient 时加上对角线格点修正和盒外闭合；对角线平坦的场直接用挖去对角线的和。

    Args:
        G: 非对角场
        s: 阶数，取值 [0, 1]

    Returns:
        标量场
    """
    _check_order(s)
    grid = G.grid
    w = grid.weights
    out = np.empty(grid.size)
    for rows in grid.row_blocks():
        dist = grid.pair_distances(rows)
        out[rows] = 2.0 * np.sum(G.values[rows] * w[None, :] / dist ** (grid.dim + s), axis=1)

    if G.has_provenance:
        total = s + G.order
        out += divergence_correction(G.source, total)
        out += exterior_term(G.source, total)
    return ScalarField(grid, out)


def scale_by_distance(F: OffDiagonalField, power: float) -> OffDiagonalField:
    """F(x,y)·|x−y|^power，结果不带来源信息"""
    dist = F.grid.distance_matrix()
    np.fill_diagonal(dist, 1.0)
    return OffDiagonalField(F.grid, odd_from_upper(F.values * dist ** power))
