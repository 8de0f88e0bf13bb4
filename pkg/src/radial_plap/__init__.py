"""Numerical checks for radial solutions of degenerate p-Laplace equations.

Modules:
    core        scalar functions, weights, problem descriptions
    singquad    quadrature with endpoint singularities
    opial       Beesack-Das type Opial constants and inequality checks
    conditions  the assumption families A1-A5 and their bundles
    radial_ode  shooting solver, residuals, radial reduction
    theorems    verdict harnesses and power-law constructions
    cli         ``radial-plap`` command line
"""

from ._jit import USE_NUMBA
from .core import (
    Constant,
    Form,
    GrowthEnvelope,
    HZero,
    OddPower,
    Opaque,
    OpaqueH,
    PowerLaw,
    ProblemSpec,
    ScalarFn,
    SharpnessProduct,
    Sum,
    VChoice,
    WeightSpec,
    big_phi,
    big_phi_inverse,
    d_a,
    delta_a,
    phi_p,
    phi_p_inverse,
)
from .errors import RadialPlapError
from .opial import OpialSetup, Pin, opial_constant, opial_constant_power_closed_form, verify_opial
from .conditions import ConditionSetId, Status, check_set
from .radial_ode import Direction, ShootSpec, Trajectory, radial_reduce, residual, solve
from .theorems import Verdict, VerdictStatus

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA", "Constant", "Form", "GrowthEnvelope", "HZero", "OddPower", "Opaque", "OpaqueH",
    "PowerLaw", "ProblemSpec", "ScalarFn", "SharpnessProduct", "Sum", "VChoice", "WeightSpec",
    "big_phi", "big_phi_inverse", "d_a", "delta_a", "phi_p", "phi_p_inverse", "RadialPlapError",
    "OpialSetup", "Pin", "opial_constant", "opial_constant_power_closed_form", "verify_opial",
    "ConditionSetId", "Status", "check_set", "Direction", "ShootSpec", "Trajectory",
    "radial_reduce", "residual", "solve", "Verdict", "VerdictStatus",
]
