"""Numerical variational toolkit for a critical-growth Kirchhoff model.

The model couples a nonlocal gradient coefficient (a + b * int |grad u|^2)
with a critical power |u|^4 u and a concave perturbation lambda * f |u|^(q-2) u,
1 < q < 2, on radial domains in R^3.  The package computes every closed-form
threshold of the model, verifies the instanton (Aubin-Talenti) estimates, and
finds the constrained local minimizer, the mountain-pass point, and the ground
state, including the b -> 0 continuation.
"""

from .grids import (
    DomainKind,
    GridMismatch,
    RadialFunction,
    RadialGrid,
    build_grid,
    dirichlet_energy,
    h1_inner,
    h1_norm,
    lp_norm,
)
from .variational import (
    FiberCoefficients,
    NoInteriorMax,
    ProblemParams,
    WeightProfile,
    constant_profile,
    critical_weight,
    energy,
    fiber_coefficients,
    fiber_energy,
    fiber_maximize,
    frozen_energy,
    frozen_gradient,
    gaussian_bump_profile,
    gradient,
    nehari_residual,
    residual_norm,
    subcritical_weight,
)
from .bubbles import (
    BubbleReport,
    asymptotics_check,
    bubble_report,
    cutoff_bubble,
    sobolev_constant,
    sobolev_derivation,
    talenti,
)
from .thresholds import (
    ThresholdReport,
    b0_of_lambda,
    c0_constant,
    c1_constant,
    c3_constant,
    critical_level,
    gmax_closed,
    h_roots,
    lambda0,
    lambda_tilde0,
    mountain_pass_geometry,
    threshold_report,
)
from .solvers import (
    ContinuationRecord,
    EmptyCandidateSet,
    LevelBreach,
    NoNegativeStart,
    PathState,
    Solution,
    SolverError,
    Stagnation,
    continuation_b,
    ground_state,
    local_min,
    mountain_pass,
    positivize,
)

__version__ = "0.1.0"
