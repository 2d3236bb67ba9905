"""
尾部衰减指数：log|u| 对 log|x| 的最小二乘斜率
"""
import logging

import numpy as np

from fields.field import ScalarField
from utils import fit_line

logger = logging.getLogger("fracbench.testlib")

# 尾部全为零时返回的哨兵值：衰减快于可测量范围
FASTER_THAN_MEASURABLE = float("-inf")


def decay_exponent(u: ScalarField, tail_fraction: float) -> float:
    """
    拟合尾部区域 |x| ≥ (1 − tail_fraction)·L 上的衰减指数

    Args:
        u: 标量场
        tail_fraction: 尾部占半宽的比例，取值 (0, 1]

    Returns:
        斜率；越负衰减越快。尾部没有非零值时返回 FASTER_THAN_MEASURABLE
    """
    if not 0.0 < tail_fraction <= 1.0:
        raise ValueError(f"tail_fraction 必须在 (0, 1] 内，得到 {tail_fraction}")
    grid = u.grid
    radius = np.linalg.norm(grid.nodes - np.asarray(grid.center), axis=1)
    magnitude = np.abs(u.values)
    tail = (radius >= (1.0 - tail_fraction) * grid.half_width) & (radius > 0) & (magnitude > 0)

    if np.count_nonzero(tail) < 2 or len(np.unique(radius[tail])) < 2:
        logger.info("尾部没有足够的非零值，衰减快于可测量范围")
        return FASTER_THAN_MEASURABLE

    slope, _, _ = fit_line(np.log(radius[tail]), np.log(magnitude[tail]))
    return slope
