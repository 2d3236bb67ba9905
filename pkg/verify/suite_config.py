"""
单个验证套件的配置
"""
from typing import Dict, List, Any, Optional

from config import ConfigError, GRID_CONFIG, TOLERANCE_CONFIG, RunConfig
from fields.grid import FracParams, GridSpec, make_grid
from testlib.families import get_family_specs, subsample_family


class SuiteConfig:
    """
    套件ID、指数组、函数族、网格阶梯和容差

    网格阶梯必须严格递增；每个指数组必须满足自身所属的嵌入条件。
    """

    def __init__(self, suite_id: str, settings: Dict[str, Any]):
        """
        初始化套件配置

        Args:
            suite_id: 套件ID
            settings: 合并后的设置，通常来自 RunConfig.suite_settings
        """
        self.suite_id = suite_id
        self.settings = dict(settings)
        self.tolerances: Dict[str, float] = dict(settings.get("tolerances", {}))
        self.seed = int(settings.get("seed", 0))
        self.half_width = float(settings.get("half_width", GRID_CONFIG["half_width"]))

        self.ladder = self._check_ladder(settings.get("ladder", [GRID_CONFIG["points_per_axis"]]), "ladder")
        self.ladder_2d = self._check_ladder(settings.get("ladder_2d", [GRID_CONFIG["dim2_points_per_axis"]]),
                                            "ladder_2d")

        self.params: List[FracParams] = []
        for entry in settings.get("params", []):
            try:
                params = entry if isinstance(entry, FracParams) else FracParams.from_dict(entry)
                if params.q is not None:
                    params.check_sobolev()
                elif params.regime == "holder":
                    params.check_holder()
            except (KeyError, ValueError) as e:
                raise ConfigError(f"套件 {suite_id} 的指数组 {entry} 无效: {e}")
            self.params.append(params)

    @classmethod
    def from_run_config(cls, run_config: RunConfig, suite_id: str) -> "SuiteConfig":
        return cls(suite_id, run_config.suite_settings(suite_id))

    def _check_ladder(self, ladder: Any, key: str) -> List[int]:
        values = ladder if isinstance(ladder, list) else [ladder]
        if not values or any(int(v) != v for v in values):
            raise ConfigError(f"套件 {self.suite_id} 的 {key} 必须是非空整数列表，得到 {ladder}")
        values = [int(v) for v in values]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError(f"套件 {self.suite_id} 的 {key} 必须严格递增，得到 {values}")
        return values

    def get(self, key: str, default: Any = None) -> Any:
        return self.settings.get(key, default)

    def tolerance(self, name: str, dim: int = 1) -> float:
        """容差；二维套件放宽 dim2_factor 倍"""
        if name not in self.tolerances:
            raise ConfigError(f"套件 {self.suite_id} 缺少容差 {name}")
        value = float(self.tolerances[name])
        return value * TOLERANCE_CONFIG["dim2_factor"] if dim == 2 else value

    def grid(self, points: int, dim: int = 1, half_width: Optional[float] = None) -> GridSpec:
        if half_width is None:
            half_width = self.half_width if dim == 1 else float(
                self.settings.get("half_width_2d", GRID_CONFIG["dim2_half_width"]))
        return make_grid(dim, half_width, points)

    def specs(self, key: str) -> list:
        """
        设置项 key 中列出的所有函数族的成员

        给定 family_size 时用套件种子从每个族中子采样。
        """
        family_ids = self.settings.get(key, [])
        if isinstance(family_ids, str):
            family_ids = [family_ids]
        size = self.settings.get("family_size")
        specs = []
        for family_id in family_ids:
            try:
                if size is None:
                    specs.extend(get_family_specs(family_id))
                else:
                    specs.extend(subsample_family(family_id, int(size), self.seed))
            except ValueError as e:
                raise ConfigError(f"套件 {self.suite_id}: {e}")
        return specs

    def __repr__(self) -> str:
        return f"SuiteConfig({self.suite_id!r}, ladder={self.ladder})"
