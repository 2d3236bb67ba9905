"""
Gagliardo半范、𝒟_{s,q} 泛函、Ẇ^{s,(p,q)} 范数、Hölder半范和立方体上的Poincaré比值
"""
import math
from typing import Sequence, Tuple

import numpy as np

from fields.field import ScalarField
from fields.grid import FracParams
from norms.lebesgue import lp_norm, lp_od_norm, pointwise_energies
from operators.gradient import frac_gradient


def _check_order(s: float) -> None:
    if not 0.0 < s < 1.0:
        raise ValueError(f"s 必须在 (0, 1) 内，得到 {s}")


def gagliardo_seminorm(u: ScalarField, s: float, p: float) -> float:
    """[u]_{W^{s,p}} = ‖d_s u‖_{L^p_od}"""
    _check_order(s)
    return lp_od_norm(frac_gradient(u, s), p)


def dsq_functional(u: ScalarField, s: float, q: float) -> ScalarField:
    """
    𝒟_{s,q}(u)(x) = (∫ |u(x) − u(y)|^q/|x−y|^{sq} dy/|x−y|^n)^{1/q}

    内层积分与 lp_od_norm 共用逐行求和及对角线修正，因此 q = p 时满足离散Fubini恒等式。

    Args:
        u: 标量场
        s: 阶数，(0, 1)
        q: 指数，[1, ∞)

    Returns:
        非负标量场
    """
    _check_order(s)
    if not 1.0 <= q < math.inf:
        raise ValueError(f"q 必须在 [1, ∞) 内，得到 {q}")
    energies = pointwise_energies(frac_gradient(u, s), q)
    return ScalarField(u.grid, np.maximum(energies, 0.0) ** (1.0 / q))


def wspq_norm(u: ScalarField, s: float, p: float, q: float) -> float:
    """‖u‖_{Ẇ^{s,(p,q)}} = ‖𝒟_{s,q}(u)‖_{L^p}"""
    return lp_norm(dsq_functional(u, s, q), p)


def holder_seminorm(u: ScalarField, alpha: float) -> float:
    """max_{i≠j} |u_i − u_j|/|x_i − x_j|^α"""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha 必须在 (0, 1] 内，得到 {alpha}")
    grid = u.grid
    best = 0.0
    for rows in grid.row_blocks():
        dist = grid.pair_distances(rows)
        block = np.abs(u.values[rows, None] - u.values[None, :]) / dist ** alpha
        best = max(best, float(np.max(block)))
    return best


def cube_poincare_terms(u: ScalarField, cube: Tuple[Sequence[float], float],
                        s: float, p: float, q: float) -> Tuple[float, float]:
    """
    立方体 Q 上的 (‖u − ⨍_Q u‖_{L^q(Q)}, (∬_{Q×Q} |u(x)−u(y)|^p/|x−y|^{n+sp})^{1/p})

    Args:
        u: 标量场
        cube: (中心, 半宽)
        s, p, q: 指数，须满足 1/q = 1/p − s/n

    Returns:
        (左端, 右端)
    """
    FracParams(s, p, q, u.grid.dim).check_sobolev()
    center, half_width = cube
    sub, index = u.grid.restrict(np.atleast_1d(center), half_width)
    v = ScalarField(sub, u.values[index])
    if np.max(v.values) == np.min(v.values):
        return 0.0, 0.0
    mean = float(np.sum(sub.weights * v.values) / np.sum(sub.weights))
    return lp_norm(v - mean, q), gagliardo_seminorm(v, s, p)


def cube_poincare_ratio(u: ScalarField, cube: Tuple[Sequence[float], float],
                        s: float, p: float, q: float) -> float:
    """
    分数Poincaré比值；0/0 记为 0，右端为零而左端非零时返回 +∞
    """
    lhs, rhs = cube_poincare_terms(u, cube, s, p, q)
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        return math.inf
    return lhs / rhs
