from fields.grid import GridSpec, GridMismatchError, FracParams, Mollifier, make_grid
from fields.field import ScalarField, OffDiagonalField, antisymmetrize, pair_scalar, pair_od, reflect
from fields.io import FieldFormatError, read_field_csv, write_field_csv

__all__ = [
    "GridSpec", "GridMismatchError", "FracParams", "Mollifier", "make_grid",
    "ScalarField", "OffDiagonalField", "antisymmetrize", "pair_scalar", "pair_od", "reflect",
    "FieldFormatError", "read_field_csv", "write_field_csv",
]
