from operators.gradient import frac_gradient, frac_divergence, scale_by_distance
from operators.mollify import mollify_scalar, mollify_od, kernel_l1_norm, interior_grid
from operators.laplacian import (
    SpectralPlan, frac_laplacian_integral, frac_laplacian_spectral, kappa_theory, fit_proportionality,
)

__all__ = [
    "frac_gradient", "frac_divergence", "scale_by_distance",
    "mollify_scalar", "mollify_od", "kernel_l1_norm", "interior_grid",
    "SpectralPlan", "frac_laplacian_integral", "frac_laplacian_spectral", "kappa_theory",
    "fit_proportionality",
]
