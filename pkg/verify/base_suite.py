"""
验证套件基类，定义所有套件需要实现的接口
"""
import logging
import sys
from abc import ABC, abstractmethod
from typing import Dict, Iterable, Any, Optional

import numpy as np
from tqdm import tqdm

from config import OUTPUT_CONFIG
from fields.field import ScalarField
from verify.report import CaseRecord, VerificationReport, NAN
from verify.suite_config import SuiteConfig

# 视为"分数梯度为零"的半范上限，以及视为"常数"的值域跨度上限
RIGIDITY_SEMINORM = 1e-12
RIGIDITY_SPAN = 1e-10


class BaseSuite(ABC):
    """
    所有验证套件的基类
    """

    suite_id = ""

    def __init__(self, cfg: SuiteConfig):
        """
        初始化套件

        Args:
            cfg: 套件配置
        """
        if cfg.suite_id != self.suite_id:
            raise ValueError(f"配置属于套件 {cfg.suite_id}，不能用于 {self.suite_id}")
        self.cfg = cfg
        self.report = VerificationReport(self.suite_id)
        self.logger = logging.getLogger(f"fracbench.verify.{self.suite_id}")

    @abstractmethod
    def run_cases(self) -> None:
        """
        计算全部案例并写入 self.report
        """
        pass

    def run(self) -> VerificationReport:
        self.logger.info(f"开始运行套件 {self.suite_id}")
        self.run_cases()
        self.logger.info(f"套件 {self.suite_id} 完成: {self.report.count('pass')} 通过, "
                         f"{self.report.count('fail')} 失败, {self.report.count('vacuous')} 空检验")
        return self.report

    def progress(self, items: Iterable, desc: str) -> Iterable:
        """长循环的进度条，非终端或关闭进度显示时不输出"""
        disable = not OUTPUT_CONFIG.get("progress", True) or not sys.stderr.isatty()
        return tqdm(list(items), desc=f"{self.suite_id}:{desc}", disable=disable, leave=False)

    def record(self, name: str, inputs: Dict[str, Any], ok: Optional[bool],
               lhs: float = NAN, rhs: float = NAN, ratio: float = NAN, residual: float = NAN,
               note: str = "") -> CaseRecord:
        """ok 为 None 时只记录"""
        verdict = "info" if ok is None else ("pass" if ok else "fail")
        return self.report.add(CaseRecord(name, inputs, lhs, rhs, ratio, residual, verdict, note))

    def ratio_case(self, name: str, inputs: Dict[str, Any], lhs: float, rhs: float,
                   span: float, bound: Optional[float] = None) -> Optional[float]:
        """
        记录不等式 lhs ≤ C·rhs 的比值

        0/0 记为空检验；右端（分数梯度的范数）为零而函数不是常数时判为失败。

        Args:
            name: 案例名
            inputs: 案例输入
            lhs: 左端
            rhs: 右端
            span: 被检验函数的值域跨度 max − min
            bound: 比值上限，None 时只记录

        Returns:
            比值；空检验或失败时为 None
        """
        if rhs <= RIGIDITY_SEMINORM:
            if span < RIGIDITY_SPAN:
                self.report.add(CaseRecord(name, inputs, lhs, rhs, verdict="vacuous", note="常数函数，0/0"))
            else:
                self.record(name, inputs, False, lhs, rhs,
                            note=f"分数梯度为零但函数不是常数 (max−min={span:.3g})")
            return None
        ratio = lhs / rhs
        ok = None if bound is None else ratio <= bound
        self.record(name, inputs, ok, lhs, rhs, ratio)
        return ratio


def value_span(u: ScalarField) -> float:
    return float(np.ptp(u.values))
