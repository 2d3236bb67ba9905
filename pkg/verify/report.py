"""
验证报告：逐案例记录、拟合量、收敛阶和总体判定
"""
import io
import json
import math
from typing import Dict, List, Any, Optional

import pandas as pd

from utils import sanitize_for_json

VERDICTS = ("pass", "fail", "vacuous", "info")

NAN = float("nan")

NORM_COLUMNS = ["kind", "s", "p", "q", "n", "N", "L", "value"]


class CaseRecord:
    """
    一个检验案例

    verdict 只由记录中的数值和容差决定：pass/fail 为判定结果，vacuous 表示 0/0 之类的空检验，
    info 表示只记录不判定。
    """

    def __init__(self,
                 name: str,
                 inputs: Optional[Dict[str, Any]] = None,
                 lhs: float = NAN,
                 rhs: float = NAN,
                 ratio: float = NAN,
                 residual: float = NAN,
                 verdict: str = "info",
                 note: str = ""):
        if verdict not in VERDICTS:
            raise ValueError(f"未知的判定: {verdict}")
        self.name = name
        self.inputs = inputs or {}
        self.lhs = float(lhs)
        self.rhs = float(rhs)
        self.ratio = float(ratio)
        self.residual = float(residual)
        self.verdict = verdict
        self.note = note

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "residual": self.residual,
            "verdict": self.verdict,
            "note": self.note,
        }

    def __repr__(self) -> str:
        return f"CaseRecord({self.name!r}, verdict={self.verdict!r})"


class VerificationReport:
    """
    一个套件的验证报告

    JSON 结构为 {"suite", "cases", "fits", "orders", "verdict"}，不含时间戳，
    相同配置下逐字节相同。
    """

    def __init__(self, suite_id: str):
        self.suite_id = suite_id
        self.cases: List[CaseRecord] = []
        self.fits: Dict[str, Any] = {}
        self.orders: Dict[str, Any] = {}
        self.norm_rows: List[Dict[str, Any]] = []

    def add(self, record: CaseRecord) -> CaseRecord:
        self.cases.append(record)
        return record

    def add_norm(self, result) -> None:
        """追加一个 NormResult 的CSV行"""
        self.norm_rows.append(result.to_row())

    def extend(self, other: "VerificationReport", prefix: str = "") -> None:
        """并入另一个报告的案例、拟合量和收敛阶"""
        for case in other.cases:
            case.name = prefix + case.name
            self.cases.append(case)
        self.fits.update({prefix + k: v for k, v in other.fits.items()})
        self.orders.update({prefix + k: v for k, v in other.orders.items()})
        self.norm_rows.extend(other.norm_rows)

    def count(self, verdict: str) -> int:
        return sum(1 for case in self.cases if case.verdict == verdict)

    @property
    def failed(self) -> bool:
        return self.count("fail") > 0

    @property
    def verdict(self) -> str:
        """有失败案例时为 fail；否则有通过案例时为 pass；全部为空检验或记录时为 vacuous"""
        if self.failed:
            return "fail"
        if self.count("pass") > 0:
            return "pass"
        return "vacuous"

    def to_dict(self) -> Dict[str, Any]:
        return sanitize_for_json({
            "suite": self.suite_id,
            "cases": [case.to_dict() for case in self.cases],
            "fits": self.fits,
            "orders": self.orders,
            "verdict": self.verdict,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def cases_csv(self) -> str:
        """案例表：name,lhs,rhs,ratio,residual,verdict,note"""
        columns = ["name", "lhs", "rhs", "ratio", "residual", "verdict", "note"]
        frame = pd.DataFrame([{k: c.to_dict()[k] for k in columns} for c in self.cases], columns=columns)
        return _frame_to_csv(frame)

    def norms_csv(self) -> str:
        """范数行：kind,s,p,q,n,N,L,value"""
        return _frame_to_csv(pd.DataFrame(self.norm_rows, columns=NORM_COLUMNS))

    def __repr__(self) -> str:
        return f"VerificationReport({self.suite_id!r}, cases={len(self.cases)}, verdict={self.verdict!r})"


def _frame_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
    return buffer.getvalue()


def relative_difference(a: float, b: float) -> float:
    """|a − b|/max(|a|, |b|)，两者都为零时为 0"""
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    if math.isinf(scale):
        return 0.0 if a == b else math.inf
    return abs(a - b) / scale


def relative_spread(values: List[float]) -> float:
    """(max − min)/|mean|"""
    if not values:
        return 0.0
    lo, hi = min(values), max(values)
    mean = sum(values) / len(values)
    if mean == 0.0:
        return 0.0 if hi == lo else math.inf
    return (hi - lo) / abs(mean)
