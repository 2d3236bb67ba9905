import math

import numpy as np
import pytest

from fields.field import ScalarField, OffDiagonalField
from fields.grid import make_grid
from testlib.decay import decay_exponent, FASTER_THAN_MEASURABLE
from testlib.families import (get_all_families, get_family, get_family_specs, get_preset, subsample_family,
                              get_random_family)
from testlib.od_functions import OdFnSpec, eta, sample_od, bump_pair_family
from testlib.scalar_functions import ScalarFnSpec, sample_scalar


def test_scalar_kinds_evaluate_exactly(small_grid):
    gaussian = ScalarFnSpec("gaussian", center=1.0, width=2.0, amplitude=3.0)
    assert gaussian.evaluate(np.array([[1.0]]))[0] == 3.0
    assert gaussian.evaluate(np.array([[3.0]]))[0] == pytest.approx(3.0 * math.exp(-1.0))

    bump = sample_scalar(ScalarFnSpec("bump", center=0.0, radius=1.0), small_grid)
    outside = np.abs(small_grid.nodes[:, 0]) >= 1.0
    assert np.all(bump.values[outside] == 0.0)
    assert np.max(bump.values) <= math.exp(-1.0)

    indicator = ScalarFnSpec("indicator", interval=(-1.0, 1.0)).evaluate(np.array([[0.0], [1.5]]))
    assert indicator.tolist() == [1.0, 0.0]


def test_scalar_spec_validation():
    with pytest.raises(ValueError):
        ScalarFnSpec("sine")
    with pytest.raises(ValueError):
        ScalarFnSpec("gaussian", width=-1.0)
    with pytest.raises(ValueError):
        ScalarFnSpec("bump", height=2.0)
    spec = ScalarFnSpec("poly_gaussian", degree=2, width=1.5)
    assert ScalarFnSpec.from_dict(spec.to_dict()).params == spec.params


def test_gaussian_l2_norm_matches_quadrature():
    spec = ScalarFnSpec("gaussian", width=1.0, amplitude=1.0)
    grid = make_grid(1, 10.0, 401)
    u = sample_scalar(spec, grid)
    assert np.sum(u.values ** 2 * grid.weights) == pytest.approx(spec.l2_norm_squared(1), rel=1e-10)
    assert spec.l2_norm_squared(1) == pytest.approx(math.sqrt(math.pi / 2))


def test_eta_is_a_smooth_step():
    t = np.array([0.0, 1e-3, 0.5, 1.0, 2.0])
    values = eta(t)
    assert values[0] == 0.0
    assert values[1] == 0.0
    assert values[2] == pytest.approx(0.5)
    assert values[3] == 1.0 and values[4] == 1.0


def test_disjoint_bumps_vanish_near_diagonal(grid):
    spec = OdFnSpec("disjoint_bumps", b={"kind": "bump", "center": -2.0, "radius": 1.0},
                    c={"kind": "bump", "center": 2.0, "radius": 1.0})
    G = sample_od(spec, grid)
    assert isinstance(G, OffDiagonalField)
    assert spec.support_gap() == pytest.approx(2.0)
    assert np.all(G.values[grid.distance_matrix() < 2.0] == 0.0)
    assert np.max(np.abs(G.values)) > 0


def test_overlapping_bumps_rejected():
    with pytest.raises(ValueError):
        OdFnSpec("disjoint_bumps", b={"kind": "bump", "center": 0.0, "radius": 1.0},
                 c={"kind": "bump", "center": 1.0, "radius": 1.0})


def test_cutoff_and_gaussian_pair_fields_are_flat_near_diagonal():
    grid = make_grid(1, 2.0, 401)
    for spec in get_family_specs("od_cutoff") + get_family_specs("od_gaussian_pairs"):
        G = sample_od(spec, grid)
        near = grid.distance_matrix() <= 3.0 * grid.spacing
        assert np.max(np.abs(G.values[near])) < 1e-30


def test_bump_pair_family_has_disjoint_members():
    specs = bump_pair_family(16)
    assert len(specs) == 16
    assert all(spec.support_gap() > 0 for spec in specs)
    assert len({repr(spec) for spec in specs}) == 16


def test_family_registry():
    families = get_all_families()
    ids = [f["id"] for f in families]
    assert len(ids) == len(set(ids))
    for family_id in ids:
        assert get_family_specs(family_id)
    assert get_family("no_such_family") is None
    with pytest.raises(ValueError):
        get_family_specs("no_such_family")

    first = [repr(s) for s in subsample_family("bb_family", 3, seed=7)]
    assert first == [repr(s) for s in subsample_family("bb_family", 3, seed=7)]
    assert len(first) == 3
    assert len(subsample_family("bb_family", 100, seed=7)) == len(get_family_specs("bb_family"))
    assert get_random_family(5)["id"] == get_random_family(5)["id"]

    assert get_preset("gaussian").kind == "gaussian"
    assert isinstance(get_preset("disjoint_bumps"), OdFnSpec)
    with pytest.raises(ValueError):
        get_preset("no_such_preset")


def test_decay_exponent_of_power_law():
    grid = make_grid(1, 20.0, 801)
    x = grid.nodes[:, 0]
    u = ScalarField(grid, 1.0 / (1.0 + x ** 2) ** 2)
    assert decay_exponent(u, 0.5) == pytest.approx(-4.0, abs=0.1)


def test_decay_exponent_sentinel_for_zero_tail(grid):
    assert decay_exponent(ScalarField(grid, np.zeros(grid.size)), 0.5) == FASTER_THAN_MEASURABLE
    bump = sample_scalar(ScalarFnSpec("bump", radius=2.0), grid)
    assert decay_exponent(bump, 0.5) == FASTER_THAN_MEASURABLE
    with pytest.raises(ValueError):
        decay_exponent(bump, 0.0)
