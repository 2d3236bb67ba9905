import numpy as np
import pytest

from fields.field import ScalarField, OffDiagonalField, antisymmetrize, pair_scalar, pair_od, reflect
from fields.grid import GridSpec, GridMismatchError, FracParams, Mollifier, make_grid
from fields.io import FieldFormatError, read_field_csv, write_field_csv
from operators.gradient import frac_divergence, frac_gradient
from testlib.od_functions import OdFnSpec, sample_od
from testlib.scalar_functions import sample_scalar


def test_trapezoid_weights_integrate_constants():
    grid = make_grid(1, 10.0, 101)
    assert grid.spacing == pytest.approx(0.2)
    assert np.sum(grid.weights) == pytest.approx(20.0, rel=1e-14)
    assert grid.weights[0] == pytest.approx(grid.spacing / 2)

    grid_2d = make_grid(2, 2.0, 9)
    assert grid_2d.size == 81
    assert np.sum(grid_2d.weights) == pytest.approx(16.0, rel=1e-14)


@pytest.mark.parametrize("dim,half_width,points", [(3, 1.0, 8), (1, 0.0, 8), (1, 1.0, 1), (1, 1.0, 7.5)])
def test_invalid_grid_rejected(dim, half_width, points):
    with pytest.raises(ValueError):
        GridSpec(dim, half_width, points)


def test_pair_distances_have_infinite_diagonal(small_grid):
    dist = small_grid.distance_matrix()
    assert np.all(np.isinf(np.diagonal(dist)))
    assert dist[0, 1] == pytest.approx(small_grid.spacing)


def test_restrict_selects_cube_nodes():
    grid = make_grid(1, 4.0, 81)
    sub, index = grid.restrict([0.0], 1.0)
    assert sub.points_per_axis == 21
    assert np.allclose(sub.nodes[:, 0], grid.nodes[index, 0])
    assert sub.spacing == pytest.approx(grid.spacing)

    with pytest.raises(ValueError):
        grid.restrict([0.0], 0.01)


def test_dilate_keeps_node_count(grid):
    dilated = grid.dilate(2.0)
    assert dilated.points_per_axis == grid.points_per_axis
    assert dilated.half_width == grid.half_width / 2
    assert np.array_equal(dilated.nodes * 2.0, grid.nodes)


def test_off_diagonal_field_must_be_antisymmetric(small_grid):
    raw = np.ones((small_grid.size, small_grid.size))
    np.fill_diagonal(raw, 0.0)
    with pytest.raises(ValueError):
        OffDiagonalField(small_grid, raw)


def test_antisymmetrize_removes_symmetric_part(small_grid):
    rng = np.random.default_rng(0)
    g = rng.normal(size=small_grid.size)
    projected = antisymmetrize(small_grid, np.outer(g, g))
    assert np.max(np.abs(projected.values)) == 0.0


def test_pairings_and_reflection(small_grid, gaussian):
    u = sample_scalar(gaussian, small_grid)
    F = frac_gradient(u, 0.5)
    G = sample_od(OdFnSpec("disjoint_bumps", b={"kind": "bump", "center": -2.0, "radius": 1.0},
                           c={"kind": "bump", "center": 2.0, "radius": 1.0}), small_grid)
    assert pair_od(F, G) == pytest.approx(pair_od(G, F), rel=1e-14)
    assert np.array_equal(reflect(G).values, -G.values)
    assert pair_scalar(u, u) > 0

    other = ScalarField(make_grid(1, 6.0, 49), np.zeros(49))
    with pytest.raises(GridMismatchError):
        pair_scalar(u, other)


def test_frac_params_regimes():
    assert FracParams(0.25, 2.0, 4.0, 1).regime == "sobolev"
    assert FracParams(0.75, 2.0, None, 1).holder_alpha() == pytest.approx(0.25)
    assert FracParams(0.5, 2.0, 4.0, 2).sobolev_exponent() == pytest.approx(4.0)
    with pytest.raises(ValueError):
        FracParams(0.25, 2.0, 3.0, 1).check_sobolev()
    with pytest.raises(ValueError):
        FracParams(0.5, 2.0, None, 1).holder_alpha()


def test_mollifier_has_unit_mass():
    for shape in ("gaussian", "bump"):
        for dim in (1, 2):
            assert Mollifier(shape, 0.5, dim).mass() == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        Mollifier("box", 0.5)


def test_csv_round_trip_is_bit_exact(tmp_path, small_grid, gaussian):
    u = sample_scalar(gaussian, small_grid)
    F = frac_gradient(u, 0.5)
    write_field_csv(u, str(tmp_path / "u.csv"))
    write_field_csv(F, str(tmp_path / "F.csv"))

    u_back = read_field_csv(str(tmp_path / "u.csv"))
    F_back = read_field_csv(str(tmp_path / "F.csv"))
    assert isinstance(F_back, OffDiagonalField)
    assert u_back.grid == small_grid
    assert np.array_equal(u_back.values, u.values)
    assert np.array_equal(F_back.values, F.values)


def test_malformed_field_file_names_the_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# grid n=1 L=1 N=3\n0,1.0\n1,abc\n2,3.0\n", encoding="utf-8")
    with pytest.raises(FieldFormatError) as info:
        read_field_csv(str(path))
    assert info.value.row == 3


def test_missing_header_is_a_format_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,1.0\n1,2.0\n", encoding="utf-8")
    with pytest.raises(FieldFormatError) as info:
        read_field_csv(str(path))
    assert info.value.row == 1


def test_pair_od_is_bilinear_and_blind_to_symmetric_parts(small_grid, gaussian):
    rng = np.random.default_rng(1)
    F = frac_gradient(sample_scalar(gaussian, small_grid), 0.5).without_provenance()
    G1 = antisymmetrize(small_grid, rng.normal(size=(small_grid.size, small_grid.size)))
    G2 = antisymmetrize(small_grid, rng.normal(size=(small_grid.size, small_grid.size)))
    combined = G1.scaled(2.5) + G2.scaled(-0.75)
    expected = 2.5 * pair_od(F, G1) - 0.75 * pair_od(F, G2)
    assert pair_od(F, combined) == pytest.approx(expected, rel=1e-12)

    raw = rng.normal(size=(small_grid.size, small_grid.size))
    symmetric = raw + raw.T
    assert pair_od(F, antisymmetrize(small_grid, G1.values + symmetric)) == pytest.approx(pair_od(F, G1), rel=1e-12)
    assert pair_od(F, reflect(G1)) == pytest.approx(-pair_od(F, G1), rel=1e-14)


def test_csv_round_trip_in_two_dimensions(tmp_path, grid_2d, gaussian):
    u = sample_scalar(gaussian, grid_2d)
    F = frac_gradient(u, 0.5)
    write_field_csv(u, str(tmp_path / "u.csv"))
    write_field_csv(F, str(tmp_path / "F.csv"))

    u_back = read_field_csv(str(tmp_path / "u.csv"))
    F_back = read_field_csv(str(tmp_path / "F.csv"))
    assert u_back.grid == grid_2d and F_back.grid == grid_2d
    assert np.array_equal(u_back.values, u.values)
    assert np.array_equal(F_back.values, F.values)


def test_csv_keeps_the_center_of_restricted_and_dilated_grids(tmp_path, gaussian):
    sub, _ = make_grid(1, 10.0, 96).restrict([2.0], 3.0)
    for target in (sub, sub.dilate(3.0)):
        assert target.center != (0.0,)
        u = sample_scalar(gaussian, target)
        path = tmp_path / "u.csv"
        write_field_csv(u, str(path))
        assert " c=" in path.read_text(encoding="utf-8").splitlines()[0]
        back = read_field_csv(str(path))
        assert back.grid == target
        assert np.array_equal(back.values, u.values)


def test_centered_header_keeps_the_plain_form_at_the_origin(small_grid):
    assert small_grid.header() == "# grid n=1 L=6 N=48"
    assert GridSpec(2, 1.0, 4, (0.5, -1.0)).header() == "# grid n=2 L=1 N=4 c=0.5,-1"


def test_gradient_file_keeps_its_provenance(tmp_path, small_grid, gaussian):
    F = frac_gradient(sample_scalar(gaussian, small_grid), 0.5)
    path = tmp_path / "F.csv"
    write_field_csv(F, str(path))
    assert path.read_text(encoding="utf-8").splitlines()[1].startswith("# source order=0.5 values=")

    back = read_field_csv(str(path))
    assert back.has_provenance and back.order == 0.5
    assert np.array_equal(back.source.values, F.source.values)
    assert np.array_equal(frac_divergence(back, 0.5).values, frac_divergence(F, 0.5).values)


def test_rows_are_counted_after_the_source_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# grid n=1 L=1 N=2\n# source order=0.5 values=1,2\n0,1,0.5\n1,0,oops\n", encoding="utf-8")
    with pytest.raises(FieldFormatError) as info:
        read_field_csv(str(path))
    assert info.value.row == 4


def test_source_line_must_match_the_grid(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# grid n=1 L=1 N=2\n# source order=0.5 values=1,2,3\n0,1,0.5\n1,0,-0.5\n", encoding="utf-8")
    with pytest.raises(FieldFormatError) as info:
        read_field_csv(str(path))
    assert info.value.row == 2
