"""
命名的测试函数族，供验证套件和命令行使用
"""
from typing import Dict, List, Any, Optional, Union

import numpy as np

from testlib.od_functions import OdFnSpec
from testlib.scalar_functions import ScalarFnSpec


def _gaussian(center, width, amplitude=1.0) -> Dict[str, Any]:
    return {"kind": "gaussian", "center": center, "width": width, "amplitude": amplitude}


def _bump(center, radius) -> Dict[str, Any]:
    return {"kind": "bump", "center": center, "radius": radius}


# 函数族列表
FUNCTION_FAMILIES = [
    {
        "id": "gaussians",
        "title": "高斯函数",
        "description": "不同中心、宽度和幅值的一维高斯函数",
        "field": "scalar",
        "members": [_gaussian(0.0, 1.0), _gaussian(0.5, 1.5), _gaussian(-1.0, 0.7, 2.0)],
    },
    {
        "id": "laplacian_gaussians",
        "title": "拉普拉斯套件用高斯函数",
        "description": "在 [−10, 10] 边界处已衰减到 1e−10 以下的两个不同高斯函数",
        "field": "scalar",
        "members": [_gaussian(0.0, 1.0), _gaussian(0.5, 1.5, 2.0)],
    },
    {
        "id": "bumps",
        "title": "紧支鼓包",
        "description": "exp(−1/(1−r²)) 型紧支光滑函数",
        "field": "scalar",
        "members": [_bump(0.0, 2.0), _bump(1.0, 1.5)],
    },
    {
        "id": "poly_gaussians",
        "title": "多项式乘高斯",
        "description": "x^d·exp(−x²/σ²)",
        "field": "scalar",
        "members": [
            {"kind": "poly_gaussian", "degree": 1, "width": 1.0},
            {"kind": "poly_gaussian", "degree": 2, "width": 1.0},
        ],
    },
    {
        "id": "bb_family",
        "title": "L¹估计函数族",
        "description": "高斯、鼓包、多项式乘高斯以及一个常数（空检验）",
        "field": "scalar",
        "members": [
            _gaussian(0.0, 1.0), _gaussian(0.5, 1.5), _bump(0.0, 2.0), _bump(1.0, 1.5),
            {"kind": "poly_gaussian", "degree": 1, "width": 1.0},
            {"kind": "poly_gaussian", "degree": 2, "width": 1.0},
            {"kind": "constant", "c": 2.0},
        ],
    },
    {
        "id": "sobolev_family",
        "title": "嵌入估计函数族",
        "description": "一维嵌入和Hölder套件使用的函数",
        "field": "scalar",
        "members": [_gaussian(0.0, 1.0), _gaussian(0.5, 1.5), _bump(0.0, 2.0), {"kind": "constant", "c": 1.0}],
    },
    {
        "id": "sobolev_family_2d",
        "title": "二维嵌入估计函数族",
        "description": "二维嵌入套件使用的函数",
        "field": "scalar",
        "members": [_gaussian(0.0, 1.0), _bump(0.0, 2.0), {"kind": "constant", "c": 1.0}],
    },
    {
        "id": "amplitude_gaussians",
        "title": "不同幅值的高斯函数",
        "description": "和空间估计使用的函数，含零函数",
        "field": "scalar",
        "members": [
            _gaussian(0.0, 1.0, 0.5), _gaussian(0.0, 1.0, 1.0), _gaussian(0.0, 1.0, 2.0),
            _gaussian(0.0, 2.0, 1.0), {"kind": "constant", "c": 0.0},
        ],
    },
    {
        "id": "od_bumps",
        "title": "不相交鼓包对",
        "description": "b(x)c(y) − b(y)c(x)，在对角线邻域内恒为零",
        "field": "od",
        "members": [
            {"kind": "disjoint_bumps", "b": _bump(-2.0, 1.0), "c": _bump(2.0, 1.0)},
            {"kind": "disjoint_bumps", "b": _bump(-3.0, 0.8), "c": _bump(1.0, 1.2)},
        ],
    },
    {
        "id": "od_cutoff",
        "title": "截断分数梯度",
        "description": "d_s u·η(|x−y|/δ)，在对角线上各阶导数为零",
        "field": "od",
        "members": [
            {"kind": "cutoff_gradient", "u": _gaussian(0.0, 1.0), "s": 0.5, "delta": 0.5},
            {"kind": "cutoff_gradient", "u": {"kind": "poly_gaussian", "degree": 1, "width": 1.0},
             "s": 0.25, "delta": 1.0},
        ],
    },
    {
        "id": "od_gaussian_pairs",
        "title": "截断高斯对",
        "description": "(g1(x)g2(y) − g1(y)g2(x))·η(|x−y|/δ)，非紧支的快速衰减场",
        "field": "od",
        "members": [
            {"kind": "gaussian_pair", "g1": _gaussian(-2.0, 1.0), "g2": _gaussian(2.0, 1.0), "delta": 0.5},
            {"kind": "gaussian_pair", "g1": _gaussian(0.0, 1.0), "g2": _gaussian(1.0, 0.8), "delta": 1.0},
        ],
    },
]

# 命令行 --spec 可用的单个函数
PRESETS = {
    "gaussian": _gaussian(0.0, 1.0),
    "wide_gaussian": _gaussian(0.0, 2.0),
    "bump": _bump(0.0, 1.0),
    "poly_gaussian": {"kind": "poly_gaussian", "degree": 1, "width": 1.0},
    "indicator": {"kind": "indicator", "interval": [-1.0, 1.0]},
    "constant": {"kind": "constant", "c": 1.0},
    "zero": {"kind": "constant", "c": 0.0},
    "linear": {"kind": "linear"},
    "disjoint_bumps": {"kind": "disjoint_bumps", "b": _bump(-2.0, 1.0), "c": _bump(2.0, 1.0)},
    "cutoff_gradient": {"kind": "cutoff_gradient", "u": _gaussian(0.0, 1.0), "s": 0.5, "delta": 0.5},
    "gaussian_pair": {"kind": "gaussian_pair", "g1": _gaussian(-2.0, 1.0), "g2": _gaussian(2.0, 1.0),
                      "delta": 0.5},
}

FnSpec = Union[ScalarFnSpec, OdFnSpec]


def _build(member: Dict[str, Any]) -> FnSpec:
    if member["kind"] in ("disjoint_bumps", "cutoff_gradient", "gaussian_pair"):
        return OdFnSpec.from_dict(member)
    return ScalarFnSpec.from_dict(member)


def get_family(family_id: str) -> Optional[Dict[str, Any]]:
    """
    根据ID获取函数族

    Args:
        family_id: 函数族ID

    Returns:
        函数族字典，如果未找到则返回None
    """
    for family in FUNCTION_FAMILIES:
        if family["id"] == family_id:
            return family
    return None


def get_family_specs(family_id: str) -> List[FnSpec]:
    """
    函数族成员的描述对象

    Args:
        family_id: 函数族ID

    Returns:
        ScalarFnSpec 或 OdFnSpec 列表
    """
    family = get_family(family_id)
    if family is None:
        raise ValueError(f"不存在的函数族: {family_id}")
    return [_build(m) for m in family["members"]]


def get_all_families() -> List[Dict[str, Any]]:
    """
    获取所有函数族的基本信息（不包含成员）

    Returns:
        函数族基本信息列表
    """
    return [
        {
            "id": f["id"],
            "title": f["title"],
            "description": f["description"],
            "field": f["field"],
            "size": len(f["members"]),
        }
        for f in FUNCTION_FAMILIES
    ]


def get_random_family(seed: int) -> Dict[str, Any]:
    """用固定种子随机选择一个函数族"""
    rng = np.random.default_rng(seed)
    return FUNCTION_FAMILIES[int(rng.integers(len(FUNCTION_FAMILIES)))]


def subsample_family(family_id: str, count: int, seed: int) -> List[FnSpec]:
    """
    用固定种子从函数族中不放回地抽取成员，保持原有顺序

    Args:
        family_id: 函数族ID
        count: 抽取个数，不小于族大小时返回全部
        seed: 随机种子

    Returns:
        描述对象列表
    """
    specs = get_family_specs(family_id)
    if count >= len(specs):
        return specs
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(specs), size=count, replace=False))
    return [specs[i] for i in chosen]


def get_preset(name: str) -> FnSpec:
    """命令行预设函数"""
    if name not in PRESETS:
        raise ValueError(f"不存在的预设函数: {name}，可选 {', '.join(sorted(PRESETS))}")
    return _build(PRESETS[name])
