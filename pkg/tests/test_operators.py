import math

import numpy as np
import pytest
from scipy import integrate

from fields.field import ScalarField, pair_od, pair_scalar
from fields.grid import Mollifier, make_grid
from operators.gradient import frac_gradient, frac_divergence, scale_by_distance
from operators.laplacian import (SpectralPlan, frac_laplacian_integral, frac_laplacian_spectral, kappa_theory,
                                 fit_proportionality, singular_integral_constant)
from operators.mollify import mollify_scalar, mollify_od, kernel_l1_norm, interior_grid, od_kernel_weights
from operators.quadrature import lattice_zeta, discrete_laplacian, exterior_mass
from norms.lebesgue import lp_od_norm
from testlib.families import get_family_specs
from testlib.od_functions import OdFnSpec, sample_od
from testlib.scalar_functions import ScalarFnSpec, sample_scalar


def test_gradient_of_constant_is_exactly_zero(grid):
    u = ScalarField(grid, np.full(grid.size, 3.7))
    for s in (0.0, 0.25, 0.5, 1.0):
        assert np.max(np.abs(frac_gradient(u, s).values)) == 0.0


def test_gradient_records_provenance(gaussian_field):
    F = frac_gradient(gaussian_field, 0.5)
    assert F.has_provenance and F.order == 0.5
    assert not F.without_provenance().has_provenance
    with pytest.raises(ValueError):
        frac_gradient(gaussian_field, 1.5)


def test_gradient_node_value(gaussian):
    grid = make_grid(1, 10.0, 41)
    u = sample_scalar(gaussian, grid)
    i = int(np.argmin(np.abs(grid.nodes[:, 0] - 1.0)))
    j = int(np.argmin(np.abs(grid.nodes[:, 0])))
    expected = (math.exp(-1.0) - 1.0) / 1.0 ** 0.5
    assert frac_gradient(u, 0.5).values[i, j] == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
def test_discrete_adjointness(grid, s):
    G = sample_od(get_family_specs("od_bumps")[0], grid)
    for spec in get_family_specs("gaussians") + get_family_specs("bumps"):
        u = sample_scalar(spec, grid)
        lhs = pair_od(frac_gradient(u, s), G)
        rhs = pair_scalar(u, frac_divergence(G, s))
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1.0)


def test_divergence_of_zero_field_is_zero(grid):
    from fields.field import OffDiagonalField
    G = OffDiagonalField(grid, np.zeros((grid.size, grid.size)))
    assert np.all(frac_divergence(G, 0.5).values == 0.0)


def test_lattice_zeta_constants():
    assert lattice_zeta(1, 2.0) == pytest.approx(math.pi ** 2 / 3)
    assert lattice_zeta(1, 0.0) == pytest.approx(-1.0)
    # Z_2(4) = 4ζ(2)β(2)
    assert lattice_zeta(2, 4.0) == pytest.approx(4 * math.pi ** 2 / 6 * 0.915965594177219, rel=1e-12)
    with pytest.raises(ValueError):
        lattice_zeta(1, 1.0)


def test_discrete_laplacian_of_quadratic():
    grid = make_grid(1, 2.0, 41)
    u = ScalarField(grid, grid.nodes[:, 0] ** 2)
    lap = discrete_laplacian(u)
    assert np.allclose(lap[2:-2], 2.0, rtol=1e-10)
    constant = ScalarField(grid, np.full(grid.size, 0.1))
    assert np.all(discrete_laplacian(constant) == 0.0)


def test_exterior_mass_closed_form():
    grid = make_grid(1, 1.0, 5)
    mass = exterior_mass(grid, 2.0)
    # 中心节点到两侧边界的距离都是 1：∫_{|y|>1} |y|^{−2} dy = 2
    assert mass[2] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        exterior_mass(grid, 1.0)


def test_laplacian_of_constant_is_exactly_zero(grid):
    u = ScalarField(grid, np.ones(grid.size))
    for s in (0.25, 0.5, 0.75):
        assert np.max(np.abs(frac_laplacian_integral(u, s).values)) == 0.0


def test_kappa_theory_half_order():
    assert singular_integral_constant(1, 0.5) == pytest.approx(1.0 / math.pi)
    assert kappa_theory(1, 0.5) == pytest.approx(2.0 * math.pi)


@pytest.mark.slow
def test_laplacian_matches_spectral_multiplier():
    grid = make_grid(1, 10.0, 512)
    u = sample_scalar(ScalarFnSpec("gaussian", width=1.0), grid)
    fit = fit_proportionality(frac_laplacian_integral(u, 0.5), SpectralPlan(grid, 0.5).apply(u), 1e-3)
    assert fit["relative_std"] <= 0.02
    assert fit["kappa"] == pytest.approx(kappa_theory(1, 0.5), rel=0.03)


def test_fused_laplacian_matches_composition(gaussian):
    grid = make_grid(1, 10.0, 128)
    u = sample_scalar(gaussian, grid)
    fused = frac_laplacian_integral(u, 0.5).values
    composed = frac_divergence(frac_gradient(u, 0.5), 0.5).values
    assert np.max(np.abs(fused - composed)) <= 1e-10 * np.max(np.abs(fused))


def test_spectral_plan_annihilates_nothing_but_constants(grid, gaussian):
    plan = SpectralPlan(grid, 0.5)
    assert plan.multiplier[0] == 0.0
    assert np.all(plan.multiplier[1:] > 0)
    assert plan.boundary_excess(sample_scalar(gaussian, grid)) < 1e-10


def test_mollify_scalar_preserves_constants(grid):
    u = ScalarField(grid, np.full(grid.size, 2.5))
    for shape in ("gaussian", "bump"):
        smoothed = mollify_scalar(u, Mollifier(shape, 0.5))
        assert np.allclose(smoothed.values, 2.5, rtol=1e-13)


def test_od_kernel_weights_are_normalized(grid):
    m = Mollifier("gaussian", 0.5)
    weights = od_kernel_weights(grid, m)
    assert sum(c for _, c in weights) == pytest.approx(1.0, rel=1e-13)
    assert kernel_l1_norm(grid, m) == pytest.approx(1.0, rel=1e-13)


def test_mollify_commutes_with_gradient_in_the_interior(gaussian):
    grid = make_grid(1, 10.0, 256)
    u = sample_scalar(gaussian, grid)
    m = Mollifier("gaussian", 0.5)
    sub, index = interior_grid(grid, m)
    left = mollify_od(frac_gradient(u, 0.5), m).restrict(index, sub)
    right = frac_gradient(mollify_scalar(u, m), 0.5).without_provenance().restrict(index, sub)
    assert lp_od_norm(left - right, 1.0) <= 1e-3 * lp_od_norm(right, 1.0)


def test_young_inequality_on_interior_pairs():
    grid = make_grid(1, 10.0, 128)
    m = Mollifier("bump", 1.0)
    sub, index = interior_grid(grid, m)
    c1 = kernel_l1_norm(grid, m)
    for spec in get_family_specs("od_bumps") + get_family_specs("od_gaussian_pairs"):
        F = sample_od(spec, grid)
        smoothed = mollify_od(F, m).restrict(index, sub)
        for p in (1.0, 2.0):
            assert lp_od_norm(smoothed, p) <= (1 + 1e-9) * c1 * lp_od_norm(F, p)


def test_interior_grid_rejects_wide_kernels(small_grid):
    with pytest.raises(ValueError):
        interior_grid(small_grid, Mollifier("bump", 10.0))


def test_distance_rescaling_turns_half_order_into_zero_order(grid, gaussian_field):
    G = sample_od(get_family_specs("od_bumps")[0], grid)
    rescaled = scale_by_distance(frac_gradient(gaussian_field, 0.5), 0.5)
    assert not rescaled.has_provenance
    assert pair_od(rescaled, G) == pytest.approx(pair_od(frac_gradient(gaussian_field, 0.0), G), rel=1e-12)
    assert np.allclose(rescaled.values, frac_gradient(gaussian_field, 0.0).values, rtol=1e-12, atol=1e-15)


def test_divergence_of_disjoint_bumps_matches_quadrature():
    grid = make_grid(1, 4.0, 257)
    b = ScalarFnSpec("bump", center=-2.0, radius=1.0)
    c = ScalarFnSpec("bump", center=2.0, radius=1.0)
    G = sample_od(OdFnSpec("disjoint_bumps", b=b.to_dict(), c=c.to_dict()), grid)
    node = int(np.argmin(np.abs(grid.nodes[:, 0] + 2.0)))
    assert grid.nodes[node, 0] == pytest.approx(-2.0, abs=1e-12)

    def integrand(y):
        return float(c.evaluate(np.array([[y]]))[0]) / (y + 2.0) ** 1.5

    tail, _ = integrate.quad(integrand, 1.0, 3.0, epsabs=1e-14, epsrel=1e-12, limit=200)
    expected = 2.0 * float(b.evaluate(np.array([[-2.0]]))[0]) * tail
    assert frac_divergence(G, 0.5).values[node] == pytest.approx(expected, rel=1e-4)


def test_spectral_half_laplacian_of_gaussian_at_origin():
    grid = make_grid(1, 10.0, 513)
    u = sample_scalar(ScalarFnSpec("gaussian", center=0.0, width=1.0, amplitude=1.0), grid)
    origin = grid.points_per_axis // 2
    assert grid.nodes[origin, 0] == 0.0
    assert frac_laplacian_spectral(u, 0.5).values[origin] == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-4)


def test_commutation_is_exact_with_a_gaussian_kernel(gaussian):
    grid = make_grid(1, 10.0, 128)
    m = Mollifier("gaussian", 0.5)
    sub, index = interior_grid(grid, m)
    u = sample_scalar(gaussian, grid)
    left = mollify_od(frac_gradient(u, 0.5), m).restrict(index, sub)
    smoothed = mollify_scalar(u, m)
    right = frac_gradient(smoothed, 0.5).without_provenance().restrict(index, sub)
    assert lp_od_norm(left - right, 1.0) <= 1e-12 * lp_od_norm(right, 1.0)
