"""Numerical evaluation of regularized holonomy observables in R x R^3.

Wilson-loop traces and area/volume/curvature functionals of hyperlink
scenes are computed as explicit finite-dimensional integrals at a schedule
of mollifier widths, then extrapolated toward the sharp limit.
"""

from .extrapolate import KappaSchedule, LimitEstimate, limit_estimate
from .geometry import (
    FourierLoop,
    Hyperlink,
    Region,
    RegionCell,
    Surface,
    SurfaceCell,
    circle_loop,
    eval_loop,
    reparametrize,
    surface_jacobians,
    validate_timelike,
)
from .integrands import (
    Scene,
    SceneValidationError,
    WilsonExponent,
    area_path_integral,
    curvature_path_integral,
    lambda_kappa,
    volume_path_integral,
    wilson_exponent,
    wilson_exponents,
    z_kappa,
)
from .kernels import KappaPoint, dzero_pair, gauss1, halfint, mixed_pair, pairing_axis
from .liealg import (
    AlgebraCoeff,
    ColoredRep,
    SpinRep,
    build_generators,
    spectrum_iE,
    trace_exp,
    trace_exp_matrix_oracle,
)
from .quadrature import QuadratureError, QuadResult, QuadSpec, integrate, integrate_nested

__version__ = "0.1.0"
