"""
恒等式类套件：离散伴随、磨光交换与Young不等式、分数拉普拉斯比例、分数散度的衰减
"""
import math

import numpy as np
from scipy import integrate

from config import QUADRATURE_CONFIG
from fields.field import ScalarField, OffDiagonalField, antisymmetrize, pair_od, pair_scalar
from fields.grid import GridSpec, Mollifier
from norms.lebesgue import lp_od_norm
from operators.gradient import frac_gradient, frac_divergence, scale_by_distance
from operators.laplacian import SpectralPlan, frac_laplacian_integral, kappa_theory, fit_proportionality
from operators.mollify import mollify_scalar, mollify_od, kernel_l1_norm, interior_grid
from testlib.decay import decay_exponent, FASTER_THAN_MEASURABLE
from testlib.od_functions import sample_od
from testlib.scalar_functions import ScalarFnSpec, sample_scalar
from verify.base_suite import BaseSuite
from verify.report import relative_spread


def commutation_residual(u: ScalarField, s: float, m: Mollifier, p: float = 1.0) -> float:
    """
    ‖φ_ε ∗ d_s u − d_s(φ_ε ∗ u)‖_{L^p_od}/‖d_s(φ_ε ∗ u)‖_{L^p_od}，只在内部节点对上计算

    Args:
        u: 标量场
        s: 阶数
        m: 磨光核
        p: 指数

    Returns:
        相对残差
    """
    sub, index = interior_grid(u.grid, m)
    smoothed_gradient = mollify_od(frac_gradient(u, s), m)
    gradient_of_smoothed = frac_gradient(mollify_scalar(u, m), s).without_provenance()
    difference = lp_od_norm((smoothed_gradient - gradient_of_smoothed).restrict(index, sub), p)
    reference = lp_od_norm(gradient_of_smoothed.restrict(index, sub), p)
    if reference == 0.0:
        return 0.0 if difference == 0.0 else math.inf
    return difference / reference


def exact_mollification(spec: ScalarFnSpec, points: np.ndarray, m: Mollifier) -> np.ndarray:
    """一维 ∫ φ_ε(z) u(x − z) dz，逐点自适应求积"""
    if m.dim != 1 or points.shape[1] != 1:
        raise ValueError("连续磨光的求积只支持一维")
    reach = m.support_radius()

    def at(x: float) -> float:
        value, _ = integrate.quad(
            lambda z: float(m.kernel(abs(z))) * float(spec.evaluate(np.array([[x - z]]))[0]),
            -reach, reach, points=[0.0], epsabs=1e-15, epsrel=1e-13, limit=200)
        return value

    return np.array([at(float(x)) for x in points[:, 0]])


def commutation_defect(spec: ScalarFnSpec, grid: GridSpec, s: float, m: Mollifier, p: float = 1.0) -> float:
    """
    离散的 φ_ε ∗ d_s u 与连续磨光 u_ε 的 d_s u_ε 之差，只在内部节点对上计算

    离散交换在内部节点对上是精确的，这里的残差只来自离散核对连续卷积的求积误差，随网格加密收敛。

    Args:
        spec: 函数描述
        grid: 一维网格
        s: 阶数
        m: 磨光核
        p: 指数

    Returns:
        相对残差
    """
    sub, index = interior_grid(grid, m)
    smoothed_gradient = mollify_od(frac_gradient(sample_scalar(spec, grid), s), m).restrict(index, sub)
    exact = ScalarField(sub, exact_mollification(spec, sub.nodes, m))
    gradient_of_exact = frac_gradient(exact, s).without_provenance()
    reference = lp_od_norm(gradient_of_exact, p)
    difference = lp_od_norm(smoothed_gradient - gradient_of_exact, p)
    if reference == 0.0:
        return 0.0 if difference == 0.0 else math.inf
    return difference / reference


class AdjointnessSuite(BaseSuite):
    """
    ⟨d_s u, G⟩_od = ⟨u, div_s G⟩ 对对角线平坦的 G 在离散层面逐项成立
    """

    suite_id = "adjointness"

    def run_cases(self) -> None:
        tol = self.cfg.tolerance("residual")
        scalar_specs = self.cfg.specs("scalar_families") + [ScalarFnSpec("constant", c=2.0)]
        od_specs = self.cfg.specs("od_families")
        worst = 0.0

        for N in self.cfg.ladder:
            grid = self.cfg.grid(N)
            fields = [(spec, sample_od(spec, grid)) for spec in od_specs]
            samples = [(spec, sample_scalar(spec, grid)) for spec in scalar_specs]
            for s in self.progress(self.cfg.get("s_values"), f"N={N}"):
                gradients = [frac_gradient(u, s) for _, u in samples]
                for od_spec, G in fields:
                    div = frac_divergence(G, s)
                    for (spec, u), du in zip(samples, gradients):
                        lhs = pair_od(du, G)
                        rhs = pair_scalar(u, div)
                        residual = abs(lhs - rhs)
                        scale = max(abs(lhs), abs(rhs), 1.0)
                        worst = max(worst, residual / scale)
                        self.record(f"N={N}/s={s}/{spec}/{od_spec.kind}",
                                    {"N": N, "s": s, "u": spec.to_dict(), "G": od_spec.to_dict()},
                                    residual <= tol * scale, lhs, rhs, residual=residual)
                self._odd_part(grid, s, samples[0][1], fields[0][1], tol)
            self._zero_order(grid, samples, fields, tol)

        self.report.fits["max_relative_residual"] = worst

    def _zero_order(self, grid, samples, fields, tol: float) -> None:
        """⟨|x−y|^{1/2}·d_{1/2}u, G⟩_od = ⟨d_0 u, G⟩_od"""
        N = grid.points_per_axis
        for spec, u in samples:
            rescaled = scale_by_distance(frac_gradient(u, 0.5), 0.5)
            plain = frac_gradient(u, 0.0)
            for od_spec, G in fields:
                lhs = pair_od(rescaled, G)
                rhs = pair_od(plain, G)
                residual = abs(lhs - rhs)
                self.record(f"N={N}/zero_order/{spec}/{od_spec.kind}",
                            {"N": N, "u": spec.to_dict(), "G": od_spec.to_dict()},
                            residual <= tol * max(abs(lhs), abs(rhs), 1.0), lhs, rhs, residual=residual)

    def _odd_part(self, grid, s: float, u: ScalarField, G: OffDiagonalField, tol: float) -> None:
        """加上对称部分再投影，配对只看到奇部"""
        g = u.values
        symmetric = np.outer(g, g)
        projected = antisymmetrize(grid, G.values + symmetric)
        lhs = pair_od(frac_gradient(u, s), projected)
        rhs = pair_scalar(u, frac_divergence(G, s))
        residual = max(abs(lhs - rhs), float(np.max(np.abs(antisymmetrize(grid, symmetric).values))))
        self.record(f"N={grid.points_per_axis}/s={s}/symmetric_part",
                    {"N": grid.points_per_axis, "s": s}, residual <= tol * max(abs(lhs), abs(rhs), 1.0),
                    lhs, rhs, residual=residual, note="对称部分在配对中消失")


class MollifySuite(BaseSuite):
    """
    φ_ε ∗ d_s u = d_s(φ_ε ∗ u) 以及 ‖φ ∗ F‖_{L^p_od} ≤ ‖φ‖_{L¹}‖F‖_{L^p_od}
    """

    suite_id = "mollify"

    def run_cases(self) -> None:
        self._commutation()
        self._young()

    def _commutation(self) -> None:
        tol = self.cfg.tolerance("commutation")
        eps = float(self.cfg.get("commutation_epsilon"))
        specs = self.cfg.specs("scalar_families")
        for kernel in self.cfg.get("kernels"):
            for N in self.progress(self.cfg.ladder, f"commutation/{kernel}"):
                grid = self.cfg.grid(N)
                m = Mollifier(kernel, eps, grid.dim)
                worst = 0.0
                for spec in specs:
                    u = sample_scalar(spec, grid)
                    for s in self.cfg.get("s_values"):
                        residual = commutation_residual(u, s, m)
                        worst = max(worst, residual)
                        self.record(f"commutation/{kernel}/N={N}/s={s}/{spec}",
                                    {"N": N, "s": s, "epsilon": eps, "kernel": kernel, "u": spec.to_dict()},
                                    residual <= tol, residual=residual)
                self.report.fits[f"commutation_max/{kernel}/N={N}"] = worst
        self._defect(eps, specs[:1])

    def _defect(self, eps: float, specs) -> None:
        """与连续磨光比较；贴近内部网格边缘的高斯函数一起检验，只在最细网格上判定"""
        tol = self.cfg.tolerance("commutation")
        offset = float(self.cfg.get("boundary_offset"))
        edge = ScalarFnSpec("gaussian", center=self.cfg.half_width - offset, width=1.0, amplitude=1.0)
        samples = list(specs) + [edge]
        finest = self.cfg.ladder[-1]
        for kernel in self.cfg.get("kernels"):
            for N in self.progress(self.cfg.ladder, f"defect/{kernel}"):
                grid = self.cfg.grid(N)
                m = Mollifier(kernel, eps, grid.dim)
                for spec in samples:
                    for s in self.cfg.get("s_values"):
                        defect = commutation_defect(spec, grid, s, m)
                        self.report.fits[f"defect/{kernel}/N={N}/s={s}/{spec}"] = defect
                        self.record(f"defect/{kernel}/N={N}/s={s}/{spec}",
                                    {"N": N, "s": s, "epsilon": eps, "kernel": kernel, "u": spec.to_dict()},
                                    defect <= tol if N == finest else None, residual=defect)

    def _young(self) -> None:
        slack = self.cfg.tolerance("young_slack")
        N = int(self.cfg.get("young_points", self.cfg.ladder[0]))
        grid = self.cfg.grid(N)
        violations = 0
        for spec in self.progress(self.cfg.specs("od_families"), "young"):
            F = sample_od(spec, grid)
            norms = {p: lp_od_norm(F, p) for p in (1.0, 2.0)}
            for kernel in self.cfg.get("kernels"):
                for eps in self.cfg.get("epsilons"):
                    m = Mollifier(kernel, eps, grid.dim)
                    sub, index = interior_grid(grid, m)
                    smoothed = mollify_od(F, m).restrict(index, sub)
                    c1 = kernel_l1_norm(grid, m)
                    for p, norm in norms.items():
                        lhs = lp_od_norm(smoothed, p)
                        rhs = c1 * norm
                        ok = lhs <= (1.0 + slack) * rhs
                        if not ok:
                            violations += 1
                        self.record(f"young/{kernel}/eps={eps}/p={p:g}/{spec.kind}",
                                    {"N": N, "epsilon": eps, "kernel": kernel, "p": p, "F": spec.to_dict()},
                                    ok, lhs, rhs, lhs / rhs if rhs > 0 else float("nan"))
        self.report.fits["young_violations"] = violations


class LaplacianSuite(BaseSuite):
    """
    div_s d_s u 与傅里叶乘子实现成比例，比例常数与 u 和 x 无关
    """

    suite_id = "laplacian"

    def run_cases(self) -> None:
        trust = float(self.cfg.get("trust_fraction"))
        boundary_tol = QUADRATURE_CONFIG["spectral_boundary_tol"]
        specs = self.cfg.specs("scalar_families")

        for N in self.cfg.ladder:
            grid = self.cfg.grid(N)
            constant = ScalarField(grid, np.ones(grid.size))
            for s in self.progress(self.cfg.get("s_values"), f"N={N}"):
                theory = kappa_theory(grid.dim, s)
                self.report.fits[f"kappa_theory/s={s}"] = theory
                flat = float(np.max(np.abs(frac_laplacian_integral(constant, s).values)))
                self.record(f"N={N}/s={s}/constant", {"N": N, "s": s}, flat == 0.0, lhs=flat, rhs=0.0)

                plan = SpectralPlan(grid, s)
                kappas = []
                for spec in specs:
                    u = sample_scalar(spec, grid)
                    name = f"N={N}/s={s}/{spec}"
                    inputs = {"N": N, "s": s, "u": spec.to_dict()}
                    excess = plan.boundary_excess(u)
                    if excess > boundary_tol:
                        self.record(f"{name}/boundary", inputs, False, residual=excess,
                                    note="边界值超过谱方法阈值")
                        continue

                    fused = frac_laplacian_integral(u, s)
                    fit = fit_proportionality(fused, plan.apply(u), trust)
                    kappa = fit["kappa"]
                    kappas.append(kappa)
                    self.record(f"{name}/ratio_std", dict(inputs, trusted_nodes=fit["trusted_nodes"]),
                                fit["relative_std"] <= self.cfg.tolerance("ratio_std"),
                                lhs=kappa, residual=fit["relative_std"])

                    deviation = abs(kappa - theory) / theory
                    self.record(f"{name}/kappa_theory", inputs, deviation <= self.cfg.tolerance("kappa_theory"),
                                kappa, theory, kappa / theory, deviation)

                    unfused = frac_divergence(frac_gradient(u, s), s)
                    scale = float(np.max(np.abs(fused.values)))
                    gap = float(np.max(np.abs(fused.values - unfused.values))) / scale
                    self.record(f"{name}/fused", inputs, gap <= self.cfg.tolerance("fused"), residual=gap)

                if len(kappas) > 1:
                    spread = relative_spread(kappas)
                    self.record(f"N={N}/s={s}/kappa_spread", {"N": N, "s": s, "kappas": kappas},
                                spread <= self.cfg.tolerance("kappa_spread"), residual=spread)
                if kappas:
                    self.report.fits[f"kappa/s={s}/N={N}"] = float(np.mean(kappas))


class DecaySuite(BaseSuite):
    """
    对角线平坦的 G 的分数散度在尾部快速衰减
    """

    suite_id = "decay"

    def run_cases(self) -> None:
        threshold = self.cfg.tolerance("exponent")
        tail = float(self.cfg.get("tail_fraction"))
        specs = self.cfg.specs("od_families")

        for N in self.cfg.ladder:
            grid = self.cfg.grid(N)
            zero = OffDiagonalField(grid, np.zeros((grid.size, grid.size)))
            fields = [("zero", {"kind": "zero"}, zero)] + \
                [(str(spec), spec.to_dict(), sample_od(spec, grid)) for spec in specs]
            for s in self.cfg.get("s_values"):
                for label, description, G in self.progress(fields, f"N={N}/s={s}"):
                    exponent = decay_exponent(frac_divergence(G, s), tail)
                    note = "尾部为零，衰减快于可测量范围" if exponent == FASTER_THAN_MEASURABLE else ""
                    self.record(f"N={N}/s={s}/{label}",
                                {"N": N, "L": grid.half_width, "s": s, "G": description},
                                exponent <= threshold, lhs=exponent, rhs=threshold, note=note)
                    self.report.fits[f"exponent/N={N}/s={s}/{label}"] = exponent
