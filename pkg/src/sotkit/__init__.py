"""sotkit: exact simultaneous optimal transport for discrete measure tuples.

Solve minimum-cost simultaneous transports, certify feasibility both by
kernel LPs and by order couplings between derivative laws, extract dual
potentials with exact zero-gap certificates, decompose two-way instances
slice by slice, evaluate Wasserstein distances on equivalence classes,
and replay the reduced backward-martingale formulation. Everything runs
in arbitrary-precision rational arithmetic.
"""

from .errors import (
    AmbiguousCluster,
    DimensionMismatch,
    DivisionByZeroMass,
    InputError,
    MissingCoords,
    NonPositiveSigma,
    NotInjectiveProfile,
    NotSubmodular,
    NotTwoWay,
    ReferenceNotEquivalent,
    SotError,
    TooLarge,
    UnbalancedInput,
    ZeroTotalMass,
)
from .measures import (
    DerivativeLaw,
    DerivativeProfile,
    DiscreteVectorMeasure,
    ReferenceMeasure,
    SupportPoint,
    make_support,
)
from .ratlp import LpSolution, RationalLpProblem
from .solver import (
    CostMatrix,
    SolveResult,
    TransportKernel,
    decomposable_cost_check,
    solve_sot,
    solve_sot_monotone_check,
)
from .feasibility import (
    FeasibilityReport,
    SigmaScheduleReport,
    cx_order_feasible,
    gaussian_markov_check,
    icx_order_feasible,
    kernel_feasible,
)
from .duality import (
    DualCertificate,
    EquilibriumAssignment,
    dual_certificate,
    equilibrium,
    twoway_dual,
    verify_dual_feasibility,
)
from .twoway import (
    comonotone_solve,
    decompose_solve,
    same_class,
    wasserstein,
    wd_lower_bound,
)
from .parity import kernel_from_martingale, parity_solve
from .bounds import positive_part_bound, simplex_bound
from .monge import RefugeeInstance, monge_gap, monge_solve, refugee_solve

__version__ = "0.1.0"
