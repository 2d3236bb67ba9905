"""
L^p 范数、非对角 L^p 范数和最优常数平移
"""
import math
from typing import Dict, Any, Optional, Tuple

import numpy as np
from scipy import optimize

from fields.field import ScalarField, OffDiagonalField
from fields.grid import GridSpec, FracParams
from operators.quadrature import gradient_energy_correction


class ConvergenceError(RuntimeError):
    """一维极小化没有收敛"""


class NormResult:
    """
    一个范数或泛函的计算结果
    """

    def __init__(self, value: float, kind: str, grid: GridSpec, params: Optional[FracParams] = None):
        if not value >= 0:
            raise ValueError(f"范数值必须非负，得到 {value}")
        self.value = float(value)
        self.kind = kind
        self.grid = grid
        self.params = params

    def to_row(self) -> Dict[str, Any]:
        """CSV行：kind,s,p,q,n,N,L,value"""
        params = self.params
        return {
            "kind": self.kind,
            "s": params.s if params else float("nan"),
            "p": params.p if params else float("nan"),
            "q": params.q if params and params.q is not None else float("nan"),
            "n": self.grid.dim,
            "N": self.grid.points_per_axis,
            "L": self.grid.half_width,
            "value": self.value,
        }

    def __repr__(self) -> str:
        return f"NormResult(kind={self.kind!r}, value={self.value})"


def _check_exponent(p: float, name: str = "p") -> None:
    if not p >= 1.0:
        raise ValueError(f"{name} 必须不小于 1，得到 {p}")


def lp_norm(u: ScalarField, p: float) -> float:
    """
    (∑|u|^p w)^{1/p}；p = ∞ 时为 max|u|

    Args:
        u: 标量场
        p: 指数，[1, ∞]

    Returns:
        范数值
    """
    _check_exponent(p)
    if math.isinf(p):
        return float(np.max(np.abs(u.values)))
    return float(np.sum(np.abs(u.values) ** p * u.grid.weights)) ** (1.0 / p)


def row_energies(F: OffDiagonalField, p: float) -> np.ndarray:
    """逐行的 ∑_{j≠i} |F(i,j)|^p w_j/|x_i − x_j|^n"""
    grid = F.grid
    w = grid.weights
    out = np.empty(grid.size)
    for rows in grid.row_blocks():
        dist = grid.pair_distances(rows)
        out[rows] = np.sum(np.abs(F.values[rows]) ** p * w[None, :] / dist ** grid.dim, axis=1)
    return out


def pointwise_energies(F: OffDiagonalField, p: float) -> np.ndarray:
    """
    逐行能量，来自 frac_gradient 的场加上对角线格点修正

    Args:
        F: 非对角场
        p: 指数，有限

    Returns:
        形状为 (M,) 的数组
    """
    energies = row_energies(F, p)
    if F.has_provenance:
        energies = energies + gradient_energy_correction(F.source, F.order, p)
    return energies


def lp_od_norm(F: OffDiagonalField, p: float) -> float:
    """
    (∑_{i≠j} |F(i,j)|^p w_i w_j/|x_i − x_j|^n)^{1/p}；p = ∞ 时为 max|F|

    Args:
        F: 非对角场
        p: 指数，[1, ∞]

    Returns:
        范数值
    """
    _check_exponent(p)
    if math.isinf(p):
        return float(np.max(np.abs(F.values)))
    total = float(np.sum(F.grid.weights * pointwise_energies(F, p)))
    return max(total, 0.0) ** (1.0 / p)


def _weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    cumulative = np.cumsum(weights[order])
    position = int(np.searchsorted(cumulative, 0.5 * cumulative[-1]))
    return float(values[order][position])


def best_constant_shift(u: ScalarField, q: float) -> Tuple[float, float]:
    """
    使 ‖u − c‖_{L^q} 最小的常数 c*

    q = 2 时为加权平均；q = 1 时为加权中位数；其余情况在 [min u, max u] 上对单调的次梯度求根。

    Args:
        u: 标量场
        q: 指数，[1, ∞)

    Returns:
        (c*, ‖u − c*‖_{L^q})
    """
    _check_exponent(q, "q")
    if math.isinf(q):
        raise ValueError("q 必须有限")
    values = u.values
    w = u.grid.weights
    lo, hi = float(np.min(values)), float(np.max(values))
    if lo == hi:
        return lo, 0.0

    if q == 2.0:
        c = float(np.sum(w * values) / np.sum(w))
    elif q == 1.0:
        c = _weighted_median(values, w)
    else:
        def subgradient(c: float) -> float:
            diff = c - values
            return float(np.sum(w * np.abs(diff) ** (q - 1.0) * np.sign(diff)))

        try:
            c, result = optimize.brentq(subgradient, lo, hi, xtol=1e-15 * max(1.0, abs(hi - lo)),
                                        maxiter=500, full_output=True)
        except (RuntimeError, ValueError) as e:
            raise ConvergenceError(f"q={q} 的常数平移极小化失败: {e}")
        if not result.converged:
            raise ConvergenceError(f"q={q} 的常数平移极小化在 {result.iterations} 步内未收敛")
        c = float(c)
    return c, lp_norm(u - c, q)
