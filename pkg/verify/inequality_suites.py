"""
不等式类套件：L¹估计、Sobolev嵌入、立方体Poincaré、Hölder嵌入以及和空间估计
"""
from abc import abstractmethod
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import SUITE_DEFAULTS
from fields.field import ScalarField
from fields.grid import FracParams, GridSpec
from norms.duality import HALF, sum_space_upper
from norms.lebesgue import NormResult, best_constant_shift, lp_od_norm
from norms.sobolev import gagliardo_seminorm, holder_seminorm, cube_poincare_terms
from operators.gradient import frac_gradient
from testlib.families import get_family_specs
from testlib.scalar_functions import ScalarFnSpec, sample_scalar
from verify.base_suite import BaseSuite, value_span, RIGIDITY_SPAN
from verify.baseline import BASELINE_KEYS, compare_to_baseline, load_baseline
from verify.report import CaseRecord, relative_difference, relative_spread


class RatioLadderSuite(BaseSuite):
    """
    lhs(u) ≤ C·rhs(u) 型估计：逐网格记录比值，检查网格阶梯上的稳定性和伸缩不变性
    """

    # 报告范数表中左右两端的 kind
    lhs_kind = "shift_lq"
    rhs_kind = "gagliardo"

    @abstractmethod
    def terms(self, u: ScalarField, params: FracParams) -> Tuple[float, float]:
        """返回 (lhs, rhs)"""
        pass

    def ratio_ladder(self, params: FracParams, dim: int, ladder: List[int],
                     specs: List[ScalarFnSpec], label: str) -> Optional[float]:
        """
        在网格阶梯上记录一组指数的比值

        Args:
            params: 指数组
            dim: 空间维数
            ladder: 每轴节点数阶梯
            specs: 被检验的函数
            label: 案例名前缀

        Returns:
            最细网格上的最大比值；没有有效比值时为 None
        """
        per_spec: Dict[str, List[float]] = {str(spec): [] for spec in specs}
        finest_max = None
        for N in ladder:
            grid = self.cfg.grid(N, dim)
            level = []
            for spec in self.progress(specs, f"{label}N={N}"):
                u = sample_scalar(spec, grid)
                lhs, rhs = self.terms(u, params)
                self.report.add_norm(NormResult(lhs, self.lhs_kind, grid, params))
                self.report.add_norm(NormResult(rhs, self.rhs_kind, grid, params))
                ratio = self.ratio_case(f"{label}N={N}/{spec}",
                                        {"N": N, "params": params.to_dict(), "u": spec.to_dict()},
                                        lhs, rhs, value_span(u))
                if ratio is not None:
                    level.append(ratio)
                    per_spec[str(spec)].append(ratio)
            if level:
                finest_max = max(level)
                self.report.fits[f"{label}max_ratio/N={N}"] = finest_max

        ladder_tol = self.cfg.tolerances.get("ladder")
        if ladder_tol is not None and len(ladder) > 1:
            for name, ratios in per_spec.items():
                if len(ratios) < 2:
                    continue
                spread = relative_spread(ratios)
                self.record(f"{label}ladder/{name}", {"ladder": ladder, "ratios": ratios},
                            spread <= self.cfg.tolerance("ladder", dim), residual=spread)

        self._dilation(params, self.cfg.grid(ladder[-1], dim), specs, label)
        return finest_max

    def _dilation(self, params: FracParams, grid: GridSpec, specs: List[ScalarFnSpec], label: str) -> None:
        """u 与 u(λ·) 在对应缩放的网格上比值相同"""
        lam = float(self.cfg.get("dilation"))
        tol = self.cfg.tolerance("dilation", grid.dim)
        dilated = grid.dilate(lam)
        for spec in specs:
            u = sample_scalar(spec, grid)
            if value_span(u) < RIGIDITY_SPAN:
                continue
            lhs, rhs = self.terms(u, params)
            lhs_lam, rhs_lam = self.terms(sample_scalar(spec, dilated, lam), params)
            if rhs == 0.0 or rhs_lam == 0.0:
                continue
            deviation = relative_difference(lhs / rhs, lhs_lam / rhs_lam)
            self.record(f"{label}dilation/{spec}", {"lambda": lam, "N": grid.points_per_axis, "u": spec.to_dict()},
                        deviation <= tol, lhs / rhs, lhs_lam / rhs_lam, residual=deviation)

    def check_baseline(self, tolerance_name: str = "baseline", upper_only: bool = False) -> None:
        baseline = load_baseline(self.cfg.get("baseline_dir"), self.suite_id)
        compare_to_baseline(self.report, baseline, BASELINE_KEYS[self.suite_id],
                            self.cfg.tolerance(tolerance_name), upper_only)


class BbL1Suite(RatioLadderSuite):
    """
    ‖u − c*‖_{L²} ≤ C‖d_{1/2}u‖_{L¹_od}（一维）
    """

    suite_id = "bb_l1"

    def terms(self, u: ScalarField, params: FracParams) -> Tuple[float, float]:
        return best_constant_shift(u, params.q)[1], gagliardo_seminorm(u, params.s, params.p)

    def run_cases(self) -> None:
        specs = self.cfg.specs("scalar_families")
        worst = None
        for params in self.cfg.params:
            value = self.ratio_ladder(params, 1, self.cfg.ladder, specs, "")
            if value is not None:
                worst = value if worst is None else max(worst, value)
        if worst is not None:
            self.report.fits["max_ratio"] = worst
        self.check_baseline()


class SobolevSuite(RatioLadderSuite):
    """
    ‖u − c*‖_{L^q} ≤ C[u]_{W^{s,p}}，1/q = 1/p − s/n，n = 1, 2
    """

    suite_id = "sobolev"

    def terms(self, u: ScalarField, params: FracParams) -> Tuple[float, float]:
        return best_constant_shift(u, params.q)[1], gagliardo_seminorm(u, params.s, params.p)

    def run_cases(self) -> None:
        worst: Dict[int, float] = {}
        for params in self.cfg.params:
            if params.n == 1:
                ladder, specs = self.cfg.ladder, self.cfg.specs("scalar_families")
            else:
                ladder, specs = self.cfg.ladder_2d, self.cfg.specs("scalar_families_2d")
            label = f"n={params.n}/s={params.s:g}/p={params.p:g}/q={params.q:g}/"
            value = self.ratio_ladder(params, params.n, ladder, specs, label)
            if value is not None:
                worst[params.n] = max(worst.get(params.n, value), value)
        for n, value in sorted(worst.items()):
            self.report.fits[f"max_ratio_n{n}"] = value
        self.check_baseline()


class HolderSuite(RatioLadderSuite):
    """
    [u]_{C^α} ≤ C[u]_{W^{s,p}}，sp > n，α = s − n/p
    """

    suite_id = "holder"
    lhs_kind = "holder"

    def terms(self, u: ScalarField, params: FracParams) -> Tuple[float, float]:
        return holder_seminorm(u, params.holder_alpha()), gagliardo_seminorm(u, params.s, params.p)

    def run_cases(self) -> None:
        specs = self.cfg.specs("scalar_families")
        worst = None
        for params in self.cfg.params:
            alpha = params.holder_alpha()
            self.report.fits[f"alpha/s={params.s:g}/p={params.p:g}"] = alpha
            value = self.ratio_ladder(params, params.n, self.cfg.ladder, specs,
                                      f"s={params.s:g}/p={params.p:g}/")
            if value is not None:
                worst = value if worst is None else max(worst, value)
        if worst is not None:
            self.report.fits["max_ratio"] = worst
        self.check_baseline()


class PoincareSuite(BaseSuite):
    """
    ‖u − ⨍_Q u‖_{L^q(Q)} ≤ C[u]_{W^{s,p}(Q)}，常数与立方体大小无关
    """

    suite_id = "poincare"

    def run_cases(self) -> None:
        N = self.cfg.ladder[-1]
        grid = self.cfg.grid(N)
        lam = float(self.cfg.get("dilation"))
        dilated = grid.dilate(lam)
        center = [float(c) for c in grid.center]
        specs = self.cfg.specs("scalar_families")
        worst = None

        for params in self.cfg.params:
            for hw in self.cfg.get("cube_half_widths"):
                cube_worst = None
                for spec in self.progress(specs, f"hw={hw}"):
                    u = sample_scalar(spec, grid)
                    lhs, rhs = cube_poincare_terms(u, (center, hw), params.s, params.p, params.q)
                    cube_grid, index = grid.restrict(center, hw)
                    self.report.add_norm(NormResult(lhs, "cube_shift_lq", cube_grid, params))
                    self.report.add_norm(NormResult(rhs, "cube_gagliardo", cube_grid, params))
                    name = f"hw={hw:g}/{spec}"
                    inputs = {"N": N, "center": center, "half_width": hw,
                              "params": params.to_dict(), "u": spec.to_dict()}
                    ratio = self.ratio_case(name, inputs, lhs, rhs, float(np.ptp(u.values[index])))
                    if ratio is None:
                        continue
                    cube_worst = ratio if cube_worst is None else max(cube_worst, ratio)

                    # 网格、函数和立方体同时缩放
                    lhs_lam, rhs_lam = cube_poincare_terms(sample_scalar(spec, dilated, lam),
                                                           ([c / lam for c in center], hw / lam),
                                                           params.s, params.p, params.q)
                    ratio_lam = lhs_lam / rhs_lam if rhs_lam > 0 else np.inf
                    deviation = relative_difference(ratio, ratio_lam)
                    self.record(f"{name}/dilation", dict(inputs, **{"lambda": lam}),
                                deviation <= self.cfg.tolerance("dilation"), ratio, ratio_lam,
                                residual=deviation)
                if cube_worst is not None:
                    self.report.fits[f"max_ratio/hw={hw:g}"] = cube_worst
                    worst = cube_worst if worst is None else max(worst, cube_worst)

        if worst is not None:
            self.report.fits["max_ratio"] = worst
        baseline = load_baseline(self.cfg.get("baseline_dir"), self.suite_id)
        compare_to_baseline(self.report, baseline, BASELINE_KEYS[self.suite_id],
                            self.cfg.tolerance("baseline"), upper_only=True)


# d_{1/2}u 取 L¹_od 与 L²
SUM_SPACE_PARAMS = FracParams(HALF, 1.0, 2.0, 1)


class SumSpaceSuite(BaseSuite):
    """
    ‖u − c*‖_{L²} ≤ C‖d_{1/2}u‖_{L¹_od + H^{−1/2}_od}

    C 取 L¹估计的常数加 1；优先使用 bb_l1 基线，否则在本套件的网格上现算。
    """

    suite_id = "sum_space"

    def run_cases(self) -> None:
        epsilons = [float(e) for e in self.cfg.get("epsilons")]
        kernel = self.cfg.get("kernel", "gaussian")
        specs = self.cfg.specs("scalar_families")

        for N in self.cfg.ladder:
            grid = self.cfg.grid(N)
            bb_constant, source = self._bb_constant(grid)
            constant = bb_constant + 1.0
            self.report.fits[f"constant/N={N}"] = constant

            for spec in self.progress(specs, f"N={N}"):
                u = sample_scalar(spec, grid)
                name = f"N={N}/{spec}"
                inputs = {"N": N, "u": spec.to_dict(), "epsilons": epsilons, "kernel": kernel,
                          "constant_source": source}
                lhs = best_constant_shift(u, 2.0)[1]
                upper, best_eps = sum_space_upper(u, epsilons, kernel)
                self.report.fits[f"optimal_epsilon/N={N}/{spec}"] = best_eps

                # 两个端点分解都是可行分解
                pure_l1 = lp_od_norm(frac_gradient(u, HALF), 1.0)
                self.report.add_norm(NormResult(lhs, "shift_lq", grid, SUM_SPACE_PARAMS))
                self.report.add_norm(NormResult(upper, "sum_space_upper", grid, SUM_SPACE_PARAMS))
                self.report.add_norm(NormResult(pure_l1, "lp_od", grid, SUM_SPACE_PARAMS))
                self.record(f"{name}/feasible", inputs, upper <= pure_l1 and upper <= lhs,
                            upper, min(pure_l1, lhs))

                if upper == 0.0 and lhs == 0.0:
                    self.report.add(CaseRecord(name, inputs, lhs, upper, verdict="vacuous", note="零函数，0/0"))
                    continue
                ratio = lhs / upper if upper > 0 else np.inf
                self.record(name, dict(inputs, epsilon=best_eps), lhs <= constant * upper,
                            lhs, upper, ratio)

    def _bb_constant(self, grid: GridSpec) -> Tuple[float, str]:
        baseline = load_baseline(self.cfg.get("baseline_dir"), "bb_l1")
        if baseline and "max_ratio" in baseline:
            return float(baseline["max_ratio"]), "baseline"
        params = FracParams.from_dict(SUITE_DEFAULTS["bb_l1"]["params"][0])
        worst = 0.0
        for family_id in SUITE_DEFAULTS["bb_l1"]["scalar_families"]:
            for spec in get_family_specs(family_id):
                u = sample_scalar(spec, grid)
                rhs = gagliardo_seminorm(u, params.s, params.p)
                if rhs > 0:
                    worst = max(worst, best_constant_shift(u, params.q)[1] / rhs)
        self.logger.info(f"没有 bb_l1 基线，在 N={grid.points_per_axis} 上现算常数 {worst:.6g}")
        return worst, "measured"
