"""
零阶能量 ∬_{[−R,R]²} |u(x) − u(y)|²/|x−y| dx dy：指示函数的闭式值及高斯函数的对照值
"""
import math
from typing import Dict, Sequence

import numpy as np
from scipy import integrate, special

from testlib.scalar_functions import ScalarFnSpec
from utils import fit_line

LOG2 = math.log(2.0)


def chi_counterexample(R: float) -> float:
    """
    χ = 1_{(−1,1)} 时的能量

    对 x ∈ (−1, 1) 和 |y| > 1 逐片积分后得到
        4[(R+1)log(R+1) − (R−1)log(R−1) − 2log2]
    随 R 对数增长。

    Args:
        R: 积分区域半宽，必须大于2

    Returns:
        能量值
    """
    if not R > 2.0:
        raise ValueError(f"R 必须大于 2，得到 {R}")
    return 4.0 * (special.xlogy(R + 1.0, R + 1.0) - special.xlogy(R - 1.0, R - 1.0) - 2.0 * LOG2)


def chi_lower_bound(R: float) -> float:
    """只保留一半积分区域的下界 2∫₁^R log((y+1)/(y−1)) dy，用自适应求积计算"""
    if not R > 2.0:
        raise ValueError(f"R 必须大于 2，得到 {R}")

    def integrand(y: float) -> float:
        return math.log((y + 1.0) / (y - 1.0))

    near, _ = integrate.quad(integrand, 1.0, 2.0, epsabs=1e-13, epsrel=1e-12, limit=200)
    far, _ = integrate.quad(integrand, 2.0, R, epsabs=1e-13, epsrel=1e-12, limit=400)
    return 2.0 * (near + far)


def zero_order_energy(spec: ScalarFnSpec, R: float) -> float:
    """
    一维高斯函数的能量

    [−a, a]² 上用二重自适应求积，a = min(R, |μ| + 10σ)；a 之外 u 可以忽略，
    剩余区域的贡献为 2∫_{−a}^{a} u(x)² log((R−x)(R+x)/((a−x)(a+x))) dx。

    Args:
        spec: 高斯函数描述
        R: 积分区域半宽

    Returns:
        能量值
    """
    if spec.kind != "gaussian":
        raise ValueError(f"只支持高斯函数，得到 {spec.kind}")
    if not R > 0:
        raise ValueError(f"R 必须为正，得到 {R}")
    params = spec.params
    center = float(np.atleast_1d(params["center"])[0])
    a = min(R, abs(center) + 10.0 * params["width"])

    def u(x: float) -> float:
        return params["amplitude"] * math.exp(-((x - center) / params["width"]) ** 2)

    def core(z: float, x: float) -> float:
        if z == 0.0:
            return 0.0
        return (u(x) - u(x + z)) ** 2 / z

    inner, _ = integrate.dblquad(core, -a, a, 0.0, lambda x: a - x, epsabs=1e-11, epsrel=1e-10)
    total = 2.0 * inner
    if R > a:
        def tail(x: float) -> float:
            return u(x) ** 2 * (math.log((R - x) / (a - x)) + math.log((R + x) / (a + x)))

        far, _ = integrate.quad(tail, -a, a, epsabs=1e-12, epsrel=1e-11, limit=400)
        total += 2.0 * far
    return total


def compensated_zero_order_energy(spec: ScalarFnSpec, R: float) -> float:
    """减去共同的远场增长 4‖u‖²log R 之后的能量，对 R 有界"""
    return zero_order_energy(spec, R) - 4.0 * spec.l2_norm_squared(1) * math.log(R)


def log_fit(radii: Sequence[float], values: Sequence[float]) -> Dict[str, float]:
    """
    values 对 log R 的最小二乘直线

    Returns:
        {"slope", "intercept", "max_relative_residual"}
    """
    values = np.asarray(values, dtype=float)
    slope, intercept, residuals = fit_line(np.log(np.asarray(radii, dtype=float)), values)
    return {
        "slope": slope,
        "intercept": intercept,
        "max_relative_residual": float(np.max(np.abs(residuals) / np.abs(values))),
    }
