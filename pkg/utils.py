"""
工具函数，用于支持FracBench的输出、拟合和报告显示
"""
import json
import math
import os
import tempfile
import datetime
from typing import Dict, List, Any, Tuple

import numpy as np
from sklearn.linear_model import LinearRegression


def format_timestamp(timestamp: float) -> str:
    """
    格式化时间戳为可用于文件名的字符串

    Args:
        timestamp: 时间戳

    Returns:
        格式化的时间字符串
    """
    dt = datetime.datetime.fromtimestamp(timestamp)
    return dt.strftime("%Y%m%d_%H%M%S")


def format_verdict(verdict: str) -> str:
    """
    将判定结果转换为描述性文本

    Args:
        verdict: 判定标识

    Returns:
        描述性文本
    """
    verdicts = {
        "pass": "通过",
        "fail": "失败",
        "vacuous": "空检验",
        "info": "仅记录",
    }
    return verdicts.get(verdict, "未知")


def sanitize_for_json(obj: Any) -> Any:
    """
    把numpy类型转换为Python类型，非有限浮点数写成字符串

    Args:
        obj: 任意嵌套的字典/列表/数值

    Returns:
        可以直接json序列化的对象
    """
    if isinstance(obj, dict):
        return {str(k): sanitize_for_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize_for_json(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize_for_json(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj


def restore_floats(obj: Any) -> Any:
    """sanitize_for_json 的逆操作：把 "inf"/"-inf"/"nan" 还原为浮点数"""
    if isinstance(obj, dict):
        return {k: restore_floats(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [restore_floats(v) for v in obj]
    if obj in ("inf", "-inf", "nan"):
        return float(obj)
    return obj


def atomic_write_text(path: str, text: str) -> None:
    """
    先写临时文件再替换，保证输出文件要么完整要么不存在

    Args:
        path: 目标路径
        text: 文件内容
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def fit_line(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, np.ndarray]:
    """
    最小二乘直线拟合

    Args:
        x: 自变量
        y: 因变量

    Returns:
        (斜率, 截距, 残差)
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    y = np.asarray(y, dtype=float)
    if len(y) < 2:
        raise ValueError("直线拟合至少需要两个点")
    model = LinearRegression().fit(x, y)
    residuals = y - model.predict(x)
    return float(model.coef_[0]), float(model.intercept_), residuals


def load_report(report_file: str) -> Dict[str, Any]:
    """
    加载验证报告文件

    Args:
        report_file: 报告文件路径

    Returns:
        报告字典
    """
    with open(report_file, "r", encoding="utf-8") as f:
        return restore_floats(json.load(f))


def list_report_files(results_dir: str = "results") -> List[str]:
    """
    列出所有验证报告文件

    Args:
        results_dir: 结果目录

    Returns:
        报告文件路径列表
    """
    if not os.path.exists(results_dir):
        return []

    files = [
        os.path.join(results_dir, f)
        for f in os.listdir(results_dir)
        if f.endswith(".json")
    ]

    # 按修改时间排序，最新的在前
    return sorted(files, key=lambda x: os.path.getmtime(x), reverse=True)


def print_report_summary(report: Dict[str, Any]) -> None:
    """
    打印验证报告摘要

    Args:
        report: 报告字典
    """
    print(f"\n===== 套件 {report.get('suite', '未指定')} =====")
    print(f"判定: {format_verdict(report.get('verdict', ''))}")

    counts: Dict[str, int] = {}
    for case in report.get("cases", []):
        counts[case["verdict"]] = counts.get(case["verdict"], 0) + 1
    print("案例: " + ", ".join(f"{format_verdict(k)} {v}" for k, v in sorted(counts.items())))

    for case in report.get("cases", []):
        if case["verdict"] == "fail":
            print(f"  失败: {case['name']} ({case.get('note', '')})")

    fits = report.get("fits", {})
    if fits:
        print("拟合量:")
        for key, value in fits.items():
            print(f"  {key}: {value}")
