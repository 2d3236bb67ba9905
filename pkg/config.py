"""
配置文件，用于存储网格默认值、求积参数、各验证套件的默认设置以及运行配置的读取
"""
import configparser
import os
from typing import Dict, List, Any, Optional


class ConfigError(ValueError):
    """配置文件无法解析或引用了不存在的套件"""


# 网格默认值
GRID_CONFIG = {
    "dim": 1,
    "half_width": 10.0,
    "points_per_axis": 256,
    "min_points_per_axis": 2,
    "recommended_points_per_axis": 8,
    # 二维网格在桌面规模下的默认值
    "dim2_half_width": 5.0,
    "dim2_points_per_axis": 64,
}

# 奇异求积与外部闭合参数
QUADRATURE_CONFIG = {
    "block_rows": 512,                # 成对求和时每块处理的行数
    "exterior_trace_tol": 1e-10,      # 边界迹低于该相对值时视为在盒外为零
    "exterior_angular_nodes": 512,    # 二维外部积分的角向Gauss-Legendre节点数
    "spectral_padding": 16,           # 谱方法的零填充倍数
    "spectral_boundary_tol": 1e-10,   # 谱方法边界值的相对阈值
    "mollifier_min_resolution": 2.0,  # epsilon 小于该倍数的步长时给出警告
    "kernel_negligible": 1e-17,       # 磨光核数值支撑半径的截断值
}

# 各验证套件的默认设置
SUITE_DEFAULTS = {
    "adjointness": {
        "ladder": [256],
        "s_values": [0.25, 0.5, 0.75],
        "scalar_families": ["gaussians", "bumps"],
        "od_families": ["od_bumps", "od_cutoff", "od_gaussian_pairs"],
        "tolerances": {"residual": 1e-10},
    },
    "mollify": {
        "ladder": [128, 256, 512],
        "s_values": [0.5],
        "epsilons": [0.25, 0.5, 1.0],
        "kernels": ["gaussian", "bump"],
        "commutation_epsilon": 0.5,
        "boundary_offset": 4.0,
        "young_points": 256,
        "scalar_families": ["gaussians"],
        "od_families": ["od_bumps", "od_cutoff", "od_gaussian_pairs"],
        "tolerances": {"commutation": 1e-3, "young_slack": 1e-9},
    },
    "laplacian": {
        "ladder": [512],
        "s_values": [0.25, 0.5, 0.75],
        "scalar_families": ["laplacian_gaussians"],
        "trust_fraction": 1e-3,
        "tolerances": {"ratio_std": 0.02, "kappa_spread": 0.02, "kappa_theory": 0.03, "fused": 1e-10},
    },
    "bb_l1": {
        "ladder": [128, 256, 512],
        "params": [{"s": 0.5, "p": 1.0, "q": 2.0, "n": 1}],
        "scalar_families": ["bb_family"],
        "dilation": 2.0,
        "tolerances": {"dilation": 0.01, "ladder": 0.05, "baseline": 0.05},
    },
    "sobolev": {
        "ladder": [128, 256, 512],
        "ladder_2d": [32, 48, 64],
        "params": [
            {"s": 0.25, "p": 2.0, "q": 4.0, "n": 1},
            {"s": 0.5, "p": 2.0, "q": 4.0, "n": 2},
        ],
        "scalar_families": ["sobolev_family"],
        "scalar_families_2d": ["sobolev_family_2d"],
        "dilation": 2.0,
        "tolerances": {"dilation": 0.01, "ladder": 0.05, "baseline": 0.05},
    },
    "poincare": {
        "ladder": [512],
        "params": [{"s": 0.5, "p": 1.0, "q": 2.0, "n": 1}],
        "scalar_families": ["bb_family"],
        "cube_half_widths": [1.0, 2.0, 4.0],
        "dilation": 2.0,
        "tolerances": {"dilation": 0.01, "baseline": 0.10},
    },
    "holder": {
        "ladder": [128, 256, 512],
        "params": [{"s": 0.75, "p": 2.0, "n": 1}],
        "scalar_families": ["sobolev_family"],
        "dilation": 2.0,
        "tolerances": {"dilation": 0.01, "ladder": 0.05, "baseline": 0.05},
    },
    "wsp_od": {
        "ladder": [256],
        "scalar_families": ["gaussians"],
        "g_family_sizes": [1, 4, 16],
        "tolerances": {"dual": 1e-6},
    },
    "sum_space": {
        "ladder": [256],
        "scalar_families": ["amplitude_gaussians"],
        "epsilons": [0.1, 0.25, 0.5, 1.0, 2.0, 4.0],
        "kernel": "gaussian",
        "tolerances": {},
    },
    "counterexample": {
        "radii": [10.0, 100.0, 1000.0, 10000.0],
        "contrast_spec": {"kind": "gaussian", "center": 0.0, "width": 1.0, "amplitude": 1.0},
        "on_grid_points": 512,
        "on_grid_radius": 10.0,
        "tolerances": {"log_fit": 0.01, "contrast": 0.01, "on_grid": 1e-3},
    },
    "decay": {
        "ladder": [1024],
        "half_width": 20.0,
        "s_values": [0.5],
        "tail_fraction": 0.5,
        "od_families": ["od_bumps", "od_gaussian_pairs"],
        "tolerances": {"exponent": -4.0},
    },
    "convergence": {
        "studies": [
            {"op": "pair_scalar", "spec": "gaussian", "s": 0.0, "ladder": [17, 33, 65, 129], "half_width": 1.0},
            {"op": "frac_gradient", "spec": "gaussian", "s": 0.5, "ladder": [41, 81, 161], "half_width": 10.0},
            {"op": "frac_laplacian_integral", "spec": "gaussian", "s": 0.5, "ladder": [129, 257, 513], "half_width": 10.0},
            {"op": "gagliardo_seminorm", "spec": "gaussian", "s": 0.5, "ladder": [129, 257, 513], "half_width": 10.0},
            {"op": "mollify_commutation", "spec": "gaussian", "s": 0.5, "ladder": [129, 257, 513], "half_width": 10.0},
        ],
        "tolerances": {"trapezoid_order": 0.3},
    },
}

# 通用容差
TOLERANCE_CONFIG = {
    "dim2_factor": 2.0,        # 二维套件相对一维放宽的倍数
    "rounding_floor": 1e-13,   # 收敛研究中视为舍入误差的相对差
}

# 输出和日志配置
OUTPUT_CONFIG = {
    "log_dir": "logs",
    "results_dir": "results",
    "baseline_dir": "baselines",
    "output_env_var": "FRACBENCH_OUTPUT_DIR",
    "formats": ["json"],
    "debug": True,
    "progress": True,
}


class RunConfig:
    """
    一次命令行运行的完整配置
    """

    def __init__(self,
                 output_dir: str,
                 formats: Optional[List[str]] = None,
                 seed: int = 0,
                 grid: Optional[Dict[str, Any]] = None,
                 suites: Optional[Dict[str, Dict[str, Any]]] = None,
                 baseline_dir: Optional[str] = None):
        """
        初始化运行配置

        Args:
            output_dir: 报告输出目录
            formats: 输出格式列表 (json, csv)
            seed: 随机种子，仅用于函数族的子采样
            grid: 全局网格默认值
            suites: 每个套件的覆盖设置
            baseline_dir: 基线文件目录
        """
        self.output_dir = output_dir
        self.formats = formats or list(OUTPUT_CONFIG["formats"])
        self.seed = seed
        self.grid = dict(GRID_CONFIG)
        self.grid.update(grid or {})
        self.suites = suites or {}
        self.baseline_dir = baseline_dir or OUTPUT_CONFIG["baseline_dir"]

        unknown = [f for f in self.formats if f not in ("json", "csv")]
        if unknown:
            raise ConfigError(f"未知的输出格式: {', '.join(unknown)}")

    def suite_settings(self, suite_id: str) -> Dict[str, Any]:
        """
        合并默认值与覆盖值，得到某个套件的设置

        Args:
            suite_id: 套件ID

        Returns:
            设置字典
        """
        if suite_id not in SUITE_DEFAULTS:
            raise ConfigError(f"不存在的套件: {suite_id}")
        settings = dict(SUITE_DEFAULTS[suite_id])
        settings["tolerances"] = dict(settings.get("tolerances", {}))
        settings.setdefault("half_width", self.grid["half_width"])
        settings["seed"] = self.seed
        settings["baseline_dir"] = self.baseline_dir
        for key, value in self.suites.get(suite_id, {}).items():
            if key.startswith("tol."):
                settings["tolerances"][key[4:]] = value
            else:
                settings[key] = value
        return settings


def default_output_dir() -> str:
    """
    返回默认输出目录：环境变量优先，其次是配置中的结果目录
    """
    from dotenv import load_dotenv

    load_dotenv()
    return os.environ.get(OUTPUT_CONFIG["output_env_var"]) or OUTPUT_CONFIG["results_dir"]


def _parse_value(raw: str, where: str) -> Any:
    """把配置文件中的文本值转换为数字、列表或字符串"""
    text = raw.strip()
    if "," in text:
        return [_parse_value(part, where) for part in text.split(",") if part.strip()]
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    if text.lower() in ("true", "false"):
        return text.lower() == "true"
    if not text:
        raise ConfigError(f"{where} 的值为空")
    return text


def _parse_params(value: Any, where: str) -> List[Dict[str, float]]:
    """解析形如 "s:p:q:n; s:p:q:n" 的指数组"""
    entries = value if isinstance(value, list) else [value]
    params = []
    for entry in entries:
        fields = str(entry).split(":")
        if len(fields) not in (3, 4):
            raise ConfigError(f"{where}: 指数组需要 s:p:q:n 或 s:p:n 形式，得到 {entry}")
        try:
            numbers = [float(f) for f in fields]
        except ValueError:
            raise ConfigError(f"{where}: 指数组中含有非数字 {entry}")
        if len(numbers) == 4:
            params.append({"s": numbers[0], "p": numbers[1], "q": numbers[2], "n": int(numbers[3])})
        else:
            params.append({"s": numbers[0], "p": numbers[1], "n": int(numbers[2])})
    return params


def load_run_config(path: Optional[str] = None,
                    output_dir: Optional[str] = None) -> RunConfig:
    """
    读取行式键值配置文件（带节头）

    Args:
        path: 配置文件路径，为None时只使用默认值
        output_dir: 命令行指定的输出目录，优先级最高

    Returns:
        运行配置
    """
    parser = configparser.ConfigParser()
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"配置文件不存在: {path}")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as e:
            raise ConfigError(f"配置文件解析失败: {e}")

    run_section = parser["run"] if parser.has_section("run") else {}
    formats = _parse_value(run_section.get("formats", "json"), "run.formats")
    seed = _parse_value(run_section.get("seed", "0"), "run.seed")
    if not isinstance(seed, int):
        raise ConfigError(f"run.seed 必须是整数，得到 {seed}")

    grid = {}
    if parser.has_section("grid"):
        for key, raw in parser["grid"].items():
            grid[key] = _parse_value(raw, f"grid.{key}")

    suites: Dict[str, Dict[str, Any]] = {}
    for section in parser.sections():
        if not section.startswith("suite."):
            continue
        suite_id = section[len("suite."):]
        if suite_id not in SUITE_DEFAULTS:
            raise ConfigError(f"配置文件引用了不存在的套件: {suite_id}")
        overrides = {}
        for key, raw in parser[section].items():
            where = f"{section}.{key}"
            value = _parse_value(raw, where)
            if key == "params":
                value = _parse_params(raw.split(";") if ";" in raw else raw, where)
            elif key in ("ladder", "ladder_2d", "s_values", "epsilons", "radii",
                         "scalar_families", "od_families", "cube_half_widths", "g_family_sizes") \
                    and not isinstance(value, list):
                value = [value]
            overrides[key] = value
        suites[suite_id] = overrides

    resolved_output = output_dir or run_section.get("output_dir") or default_output_dir()
    return RunConfig(
        output_dir=resolved_output,
        formats=formats if isinstance(formats, list) else [formats],
        seed=seed,
        grid=grid,
        suites=suites,
        baseline_dir=run_section.get("baseline_dir"),
    )
