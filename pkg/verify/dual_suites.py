"""
对偶类套件：W^{−s,p}_od 代表元范数与 H^{−1/2}_od 对偶下界，零阶能量的反例
"""
import math

from fields.grid import FracParams, make_grid
from norms.counterexample import (chi_counterexample, chi_lower_bound, zero_order_energy,
                                  compensated_zero_order_energy, log_fit)
from norms.duality import HALF, dual_hminushalf_estimate, wsp_od_norm
from norms.lebesgue import NormResult, lp_od_norm
from operators.gradient import frac_gradient
from testlib.od_functions import bump_pair_family, sample_od
from testlib.scalar_functions import ScalarFnSpec, sample_scalar
from verify.base_suite import BaseSuite
from verify.report import relative_difference


class WspOdSuite(BaseSuite):
    """
    对偶下界 max_G |⟨d_{1/2}u, G⟩|/‖div_{1/2}G‖_{L²} 不超过 ‖u − c*‖_{L²}，且随测试场族增大不减
    """

    suite_id = "wsp_od"

    def run_cases(self) -> None:
        slack = self.cfg.tolerance("dual")
        sizes = sorted(int(k) for k in self.cfg.get("g_family_sizes"))
        specs = self.cfg.specs("scalar_families") + [ScalarFnSpec("constant", c=0.0)]

        for N in self.cfg.ladder:
            grid = self.cfg.grid(N)
            family = [sample_od(spec, grid) for spec in bump_pair_family(sizes[-1])]
            for spec in self.progress(specs, f"N={N}"):
                u = sample_scalar(spec, grid)
                norm = wsp_od_norm(u, 2.0)
                self.report.add_norm(NormResult(norm, "wsp_od", grid, FracParams(HALF, 2.0)))
                for p in (1.0, 4.0):
                    value = wsp_od_norm(u, p)
                    self.report.fits[f"wsp_od/p={p:g}/N={N}/{spec}"] = value
                    self.report.add_norm(NormResult(value, "wsp_od", grid, FracParams(HALF, p)))

                previous = None
                for k in sizes:
                    estimate = dual_hminushalf_estimate(u, family[:k])
                    self.report.add_norm(NormResult(estimate, "dual_hminushalf", grid, FracParams(HALF, 2.0)))
                    name = f"N={N}/{spec}/k={k}"
                    inputs = {"N": N, "u": spec.to_dict(), "family_size": k}
                    self.record(name, inputs, estimate <= (1.0 + slack) * norm, estimate, norm,
                                estimate / norm if norm > 0 else math.nan, residual=norm - estimate)
                    if previous is not None:
                        self.record(f"{name}/monotone", inputs, estimate >= previous, estimate, previous)
                    self.report.fits[f"gap/N={N}/{spec}/k={k}"] = norm - estimate
                    previous = estimate


class CounterexampleSuite(BaseSuite):
    """
    χ_{(−1,1)} 的零阶能量随 R 无界增长；高斯函数扣除共同远场增长后有界
    """

    suite_id = "counterexample"

    def run_cases(self) -> None:
        radii = [float(r) for r in self.cfg.get("radii")]
        values = []
        for R in self.progress(radii, "chi"):
            value = chi_counterexample(R)
            lower = chi_lower_bound(R)
            self.record(f"chi/R={R:g}/lower_bound", {"R": R}, value >= lower, value, lower, value / lower)
            values.append(value)

        for (r0, v0), (r1, v1) in zip(zip(radii, values), zip(radii[1:], values[1:])):
            self.record(f"chi/R={r0:g}<R={r1:g}", {"R": [r0, r1]}, v0 < v1, v0, v1)

        if len(radii) >= 2:
            fit = log_fit(radii, values)
            self.report.fits["chi_slope"] = fit["slope"]
            self.report.fits["chi_intercept"] = fit["intercept"]
            self.record("chi/log_fit", {"radii": radii}, fit["slope"] > 0
                        and fit["max_relative_residual"] < self.cfg.tolerance("log_fit"),
                        lhs=fit["slope"], residual=fit["max_relative_residual"])

        self._contrast(radii)
        self._on_grid()

    def _contrast(self, radii) -> None:
        spec = ScalarFnSpec.from_dict(self.cfg.get("contrast_spec"))
        far_field = 4.0 * spec.l2_norm_squared(1)
        raw = []
        compensated = []
        for R in self.progress(radii, "contrast"):
            raw.append(zero_order_energy(spec, R))
            compensated.append(compensated_zero_order_energy(spec, R))
            self.report.fits[f"compensated/R={R:g}"] = compensated[-1]

        if len(radii) >= 2:
            self.report.fits["contrast_slope"] = log_fit(radii, raw)["slope"]
        self.report.fits["far_field_slope"] = far_field

        reference = compensated[-1]
        scale = max(abs(reference), far_field)
        for R, value in zip(radii[:-1], compensated[:-1]):
            deviation = abs(value - reference) / scale
            self.record(f"contrast/R={R:g}", {"R": R, "R_ref": radii[-1], "u": spec.to_dict()},
                        deviation <= self.cfg.tolerance("contrast"), value, reference, residual=deviation)

    def _on_grid(self) -> None:
        """有限盒子上 s = 0 的非对角能量与求积值一致"""
        spec = ScalarFnSpec.from_dict(self.cfg.get("contrast_spec"))
        R = float(self.cfg.get("on_grid_radius"))
        N = int(self.cfg.get("on_grid_points"))
        u = sample_scalar(spec, make_grid(1, R, N))
        on_grid = lp_od_norm(frac_gradient(u, 0.0), 2.0) ** 2
        reference = zero_order_energy(spec, R)
        deviation = relative_difference(on_grid, reference)
        self.record(f"on_grid/R={R:g}", {"R": R, "N": N, "u": spec.to_dict()},
                    deviation <= self.cfg.tolerance("on_grid"), on_grid, reference, residual=deviation)
