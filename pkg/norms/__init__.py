from norms.lebesgue import (
    ConvergenceError, NormResult, lp_norm, lp_od_norm, pointwise_energies, best_constant_shift,
)
from norms.sobolev import (
    gagliardo_seminorm, dsq_functional, wspq_norm, holder_seminorm, cube_poincare_terms,
    cube_poincare_ratio,
)
from norms.duality import dual_hminushalf_estimate, wsp_od_norm, sum_space_decompositions, sum_space_upper
from norms.counterexample import (
    chi_counterexample, chi_lower_bound, zero_order_energy, compensated_zero_order_energy, log_fit,
)

__all__ = [
    "ConvergenceError", "NormResult", "lp_norm", "lp_od_norm", "pointwise_energies", "best_constant_shift",
    "gagliardo_seminorm", "dsq_functional", "wspq_norm", "holder_seminorm", "cube_poincare_terms",
    "cube_poincare_ratio",
    "dual_hminushalf_estimate", "wsp_od_norm", "sum_space_decompositions", "sum_space_upper",
    "chi_counterexample", "chi_lower_bound", "zero_order_energy", "compensated_zero_order_energy", "log_fit",
]
