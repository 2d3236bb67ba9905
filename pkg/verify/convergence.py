"""
网格加密下的收敛研究：观测阶与Richardson外推
"""
import logging
import math
from typing import Any, Callable, Dict, List, Sequence, Union

import numpy as np

from config import TOLERANCE_CONFIG
from fields.field import ScalarField, pair_scalar
from fields.grid import GridSpec, Mollifier, make_grid
from norms.sobolev import gagliardo_seminorm
from operators.gradient import frac_gradient
from operators.laplacian import frac_laplacian_integral
from testlib.families import get_preset
from testlib.scalar_functions import ScalarFnSpec, sample_scalar
from utils import fit_line
from verify.base_suite import BaseSuite
from verify.identity_suites import commutation_defect
from verify.report import CaseRecord, VerificationReport

logger = logging.getLogger("fracbench.verify.convergence")

# 取值本身就是误差（极限为零）的量
RESIDUAL_OPS = ("mollify_commutation",)

COMMUTATION_EPSILON = 0.5
COMMUTATION_KERNEL = "bump"


def _node(u: ScalarField, x: float) -> int:
    """坐标为 x 的节点下标，x 不是节点时报错"""
    axis = u.grid.nodes[:, 0]
    index = int(np.argmin(np.abs(axis - x)))
    if abs(axis[index] - x) > 1e-9 * u.grid.spacing:
        raise ValueError(f"x={x} 不是网格节点 (N={u.grid.points_per_axis}, L={u.grid.half_width})")
    return index


def _pair_scalar(spec: ScalarFnSpec, grid: GridSpec, s: float) -> float:
    u = sample_scalar(spec, grid)
    return pair_scalar(u, u)


def _frac_gradient(spec: ScalarFnSpec, grid: GridSpec, s: float) -> float:
    u = sample_scalar(spec, grid)
    return float(frac_gradient(u, s).values[_node(u, 1.0), _node(u, 0.0)])


def _frac_laplacian(spec: ScalarFnSpec, grid: GridSpec, s: float) -> float:
    u = sample_scalar(spec, grid)
    return float(frac_laplacian_integral(u, s).values[_node(u, 0.0)])


def _gagliardo(spec: ScalarFnSpec, grid: GridSpec, s: float) -> float:
    return gagliardo_seminorm(sample_scalar(spec, grid), s, 2.0)


def _commutation(spec: ScalarFnSpec, grid: GridSpec, s: float) -> float:
    return commutation_defect(spec, grid, s, Mollifier(COMMUTATION_KERNEL, COMMUTATION_EPSILON, grid.dim))


CONVERGENCE_OPS: Dict[str, Callable[[ScalarFnSpec, GridSpec, float], float]] = {
    "pair_scalar": _pair_scalar,
    "frac_gradient": _frac_gradient,
    "frac_laplacian_integral": _frac_laplacian,
    "gagliardo_seminorm": _gagliardo,
    "mollify_commutation": _commutation,
}


def observed_order(spacings: Sequence[float], values: Sequence[float], residual: bool = False) -> float:
    """
    log|误差| 对 log h 的斜率

    误差取相邻网格之差（residual 为 True 时取值本身）；全部低于舍入下限时返回 inf，
    可用的误差少于两个时返回 nan。

    Args:
        spacings: 各网格的步长，由粗到细
        values: 各网格上的值
        residual: 取值是否本身就是误差

    Returns:
        观测阶
    """
    values = np.asarray(values, dtype=float)
    spacings = np.asarray(spacings, dtype=float)
    if residual:
        errors, h = np.abs(values), spacings
        scale = max(float(np.max(errors)), 1.0)
    else:
        errors, h = np.abs(np.diff(values)), spacings[:-1]
        scale = max(float(np.max(np.abs(values))), 1.0)

    usable = errors > TOLERANCE_CONFIG["rounding_floor"] * scale
    if not np.any(usable):
        return math.inf
    if np.count_nonzero(usable) < 2:
        return math.nan
    slope, _, _ = fit_line(np.log(h[usable]), np.log(errors[usable]))
    return slope


def richardson_limit(step_ratio: float, values: Sequence[float]) -> float:
    """
    逐层Richardson外推，第 m 层的消去因子为 step_ratio^m

    Args:
        step_ratio: 相邻网格误差之比，(h_k/h_{k+1})^order
        values: 由粗到细的值

    Returns:
        外推值
    """
    n_steps = len(values)
    if n_steps == 1:
        return values[0]

    last_level = list(values)
    this_level = None
    for m in range(1, n_steps):
        this_level = []
        mult = step_ratio ** m
        factor = 1.0 / (mult - 1.0)
        for i in range(n_steps - m):
            this_level.append(factor * (mult * last_level[i + 1] - last_level[i]))
        last_level = this_level
    return this_level[0]


def _as_spec(spec: Union[str, Dict[str, Any], ScalarFnSpec]) -> ScalarFnSpec:
    if isinstance(spec, ScalarFnSpec):
        return spec
    if isinstance(spec, str):
        return get_preset(spec)
    return ScalarFnSpec.from_dict(spec)


def convergence_study(op: str, spec: Union[str, Dict[str, Any], ScalarFnSpec], s: float,
                      ladder: Sequence[int], half_width: float = 10.0, dim: int = 1) -> VerificationReport:
    """
    在网格阶梯上计算一个量并估计观测阶

    Args:
        op: CONVERGENCE_OPS 中的量
        spec: 函数描述或预设名
        s: 阶数
        ladder: 每轴节点数，至少三个
        half_width: 网格半宽
        dim: 空间维数

    Returns:
        报告；orders[op] 为观测阶，fits 中记录各网格的值和外推值
    """
    if op not in CONVERGENCE_OPS:
        raise ValueError(f"未知的收敛研究对象: {op}，可选 {', '.join(CONVERGENCE_OPS)}")
    if len(ladder) < 3:
        raise ValueError(f"收敛研究至少需要三个网格，得到 {list(ladder)}")
    spec = _as_spec(spec)
    evaluate = CONVERGENCE_OPS[op]

    report = VerificationReport("convergence")
    spacings: List[float] = []
    values: List[float] = []
    for N in ladder:
        grid = make_grid(dim, half_width, N)
        value = evaluate(spec, grid, s)
        spacings.append(grid.spacing)
        values.append(value)
        report.add(CaseRecord(f"{op}/N={N}", {"N": N, "L": half_width, "s": s, "u": spec.to_dict()},
                              lhs=value))
        report.fits[f"{op}/value/N={N}"] = value

    residual = op in RESIDUAL_OPS
    order = observed_order(spacings, values, residual)
    report.orders[op] = order
    if residual:
        limit = 0.0
    elif math.isfinite(order) and order > 0:
        step_ratio = (spacings[0] / spacings[1]) ** order
        limit = richardson_limit(step_ratio, values)
    else:
        limit = values[-1]
    report.fits[f"{op}/richardson"] = limit
    logger.info(f"{op}: 观测阶 {order:.4g}，外推值 {limit:.12g}")
    return report


class ConvergenceSuite(BaseSuite):
    """
    各离散量的观测收敛阶
    """

    suite_id = "convergence"

    def run_cases(self) -> None:
        tol = self.cfg.tolerance("trapezoid_order")
        for study in self.progress(self.cfg.get("studies"), "studies"):
            op = study["op"]
            result = convergence_study(op, study["spec"], float(study["s"]), study["ladder"],
                                       float(study.get("half_width", self.cfg.half_width)),
                                       int(study.get("dim", 1)))
            self.report.extend(result)
            order = result.orders[op]
            inputs = {"ladder": list(study["ladder"]), "s": study["s"]}
            if op == "pair_scalar":
                self.record(f"{op}/order", inputs, abs(order - 2.0) <= tol, lhs=order, rhs=2.0,
                            residual=abs(order - 2.0))
            elif op == "frac_gradient":
                self.record(f"{op}/order", inputs, math.isinf(order) and order > 0, lhs=order,
                            note="节点上精确")
            elif op in ("frac_laplacian_integral", "mollify_commutation"):
                self.record(f"{op}/order", inputs, math.isfinite(order) and order > 0, lhs=order)
            else:
                self.record(f"{op}/order", inputs, None, lhs=order)
