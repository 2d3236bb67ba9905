from testlib.scalar_functions import ScalarFnSpec, sample_scalar
from testlib.od_functions import OdFnSpec, sample_od, eta, bump_pair_family
from testlib.decay import decay_exponent, FASTER_THAN_MEASURABLE
from testlib.families import (
    get_family, get_family_specs, get_all_families, get_random_family, subsample_family, get_preset,
)

__all__ = [
    "ScalarFnSpec", "sample_scalar", "OdFnSpec", "sample_od", "eta", "bump_pair_family",
    "decay_exponent", "FASTER_THAN_MEASURABLE",
    "get_family", "get_family_specs", "get_all_families", "get_random_family", "subsample_family",
    "get_preset",
]
