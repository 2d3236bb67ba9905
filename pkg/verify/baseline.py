"""
经验常数的基线文件：baselines/<suite>.json
"""
import json
import logging
import math
import os
from typing import Dict, Any, Optional, Sequence

from utils import atomic_write_text, restore_floats, sanitize_for_json
from verify.report import CaseRecord, VerificationReport, relative_difference

logger = logging.getLogger("fracbench.verify")

# 每个套件进入基线的拟合量
BASELINE_KEYS = {
    "bb_l1": ["max_ratio"],
    "sobolev": ["max_ratio_n1", "max_ratio_n2"],
    "poincare": ["max_ratio"],
    "holder": ["max_ratio"],
}


def baseline_path(directory: str, suite_id: str) -> str:
    return os.path.join(directory, f"{suite_id}.json")


def load_baseline(directory: str, suite_id: str) -> Optional[Dict[str, float]]:
    """
    读取基线中的拟合量

    Returns:
        拟合量字典；文件不存在时返回None
    """
    path = baseline_path(directory, suite_id)
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as f:
        data = restore_floats(json.load(f))
    return data.get("fits", {})


def save_baseline(directory: str, report: VerificationReport) -> Optional[str]:
    """
    把报告中的基线拟合量写入基线文件

    Returns:
        写入的路径；该套件没有基线量时返回None
    """
    keys = BASELINE_KEYS.get(report.suite_id)
    if not keys:
        return None
    fits = {k: report.fits[k] for k in keys if k in report.fits}
    path = baseline_path(directory, report.suite_id)
    text = json.dumps(sanitize_for_json({"suite": report.suite_id, "fits": fits}),
                      ensure_ascii=False, indent=2) + "\n"
    atomic_write_text(path, text)
    logger.info(f"基线已写入: {path}")
    return path


def compare_to_baseline(report: VerificationReport, baseline: Optional[Dict[str, float]],
                        keys: Sequence[str], tolerance: float, upper_only: bool = False) -> None:
    """
    把拟合量与基线比较，结果作为案例写入报告

    Args:
        report: 报告
        baseline: 基线拟合量；None 时记为空检验
        keys: 比较的拟合量
        tolerance: 相对容差
        upper_only: True 时只要求 当前值 ≤ 基线·(1 + tolerance)
    """
    for key in keys:
        name = f"baseline/{key}"
        value = report.fits.get(key)
        if value is None:
            continue
        if baseline is None or key not in baseline:
            report.add(CaseRecord(name, {"key": key}, lhs=value, verdict="vacuous", note="没有基线"))
            continue
        reference = float(baseline[key])
        if upper_only:
            ok = value <= reference * (1.0 + tolerance)
            residual = value / reference - 1.0 if reference else math.inf
        else:
            residual = relative_difference(value, reference)
            ok = residual <= tolerance
        report.add(CaseRecord(name, {"key": key, "tolerance": tolerance}, lhs=value, rhs=reference,
                              residual=residual, verdict="pass" if ok else "fail"))
