"""Numerical checks of volume-conjecture limits for the figure-eight knot E and the Borromean rings B."""

from .errors import (
    BracketError,
    BranchCutError,
    CutPointError,
    DomainError,
    FitError,
    NumericalError,
    QuadratureError,
    RangeError,
    RealnessError,
    ResolutionError,
    RootNotFoundError,
    SingularityError,
    VolConjError,
)
from .geometry import ConeAngles, is_hyperbolic, vol_cone, vol_cone_B, vol_cone_E
from .invariant import colored_jones, colored_jones_B, colored_jones_E, partial_sum, weights_for_angles
from .potential import PotentialSpec, critical_points, im_phi_real, phi, phi_finite_r
from .qseries import RootContext, SignedLogValue, Weights, index_partition
from .specfun import delta_fn, dilog, lobachevsky, quantum_dilog

__version__ = "0.1.0"
