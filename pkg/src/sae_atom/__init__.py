"""Single-active-electron model potentials for two-electron atoms, solved in a B-spline basis."""

__version__ = "0.1.0"

from .basis import BasisConfig, BSplineBasis, build_basis  # noqa: E402
from .potentials import PotentialModel, Variant, eval_potential  # noqa: E402
from .solver import ChannelSpec, Eigensolution, solve_channel  # noqa: E402
from .spectrum import CorePolicy, ReferenceTable, compute_levels  # noqa: E402

__all__ = [
    "BasisConfig", "BSplineBasis", "build_basis",
    "PotentialModel", "Variant", "eval_potential",
    "ChannelSpec", "Eigensolution", "solve_channel",
    "CorePolicy", "ReferenceTable", "compute_levels",
]
