"""Heights of SL2 over imaginary quadratic orders: ball enumeration, local
densities, exponential sums and an exact circle-method decomposition."""

from .errors import ArithmeticOverflowError, CostGuardError, SpecError, UnsaturatedBallError
from .group import (GroupMat, GroupSpec, OrbitBall, bianchi_spec, enumerate_ball, estimate_delta,
                    load_spec, parabolic_spec, parse_spec)
from .local import LocalStructure, admissible_structure, singular_series, tau_p, u_q
from .params import CircleParams
from .qform import QuadForm, height, qform_of, rep_count, represented_set

__version__ = "0.1.0"
