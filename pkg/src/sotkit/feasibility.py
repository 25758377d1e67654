"""Existence certification for simultaneous transports.

Two independent routes are implemented and cross-checked by the tests:
the direct kernel LP, and the coupling characterization between the two
derivative laws (a submartingale-style coupling for the increasing convex
order, a martingale coupling for the convex order in the balanced case).
Also houses the variance-schedule necessary-condition checker for
time-homogeneous Gaussian Markov marginals.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import ratlp
from .errors import DimensionMismatch, NonPositiveSigma, UnbalancedInput
from .measures import DerivativeLaw, DiscreteVectorMeasure
from .rational import parse_rational
from .solver import TransportKernel, kernel_lp

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class FeasibilityReport:
    feasible: bool
    method: str
    witness_kernel: Optional[TransportKernel] = None
    order_witness: Optional[tuple] = None  # coupling rows indexed by target atoms
    farkas: Optional[list] = None


def kernel_feasible(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure) -> FeasibilityReport:
    """Direct LP over kernel entries: row sums one, pushforward covers the target."""
    if mu.d != nu.d:
        raise DimensionMismatch(f"source has d={mu.d}, target has d={nu.d}")
    problem = kernel_lp(mu, nu)
    solution = ratlp.feasible(problem)
    if solution.status == ratlp.INFEASIBLE:
        return FeasibilityReport(False, "kernel", farkas=solution.farkas)
    kernel = TransportKernel(
        [[solution.primal[i * nu.n + k] for k in range(nu.n)] for i in range(mu.n)]
    )
    if not kernel.covers(mu, nu):
        raise AssertionError("LP witness fails coverage")
    return FeasibilityReport(True, "kernel", witness_kernel=kernel)


def _order_lp(law_mu: DerivativeLaw, law_nu: DerivativeLaw, tighten: bool):
    """Coupling r(target atom, source atom) >= 0 with both laws as marginals and
    barycenter rows  sum_z r(z', z) * z  >=  mass(z') * z'  (== when tightened)."""
    a_atoms, a_masses = law_mu.atoms, law_mu.masses
    b_atoms, b_masses = law_nu.atoms, law_nu.masses
    na, nb = len(a_atoms), len(b_atoms)
    d = len(a_atoms[0])
    problem = ratlp.RationalLpProblem(na * nb)
    var = lambda l, a: l * na + a
    for l in range(nb):
        problem.add_eq([(var(l, a), ONE) for a in range(na)], b_masses[l])
    for a in range(na):
        problem.add_eq([(var(l, a), ONE) for l in range(nb)], a_masses[a])
    for l in range(nb):
        for j in range(d):
            coeffs = [
                (var(l, a), a_atoms[a][j]) for a in range(na) if a_atoms[a][j] != 0
            ]
            rhs = b_masses[l] * b_atoms[l][j]
            if tighten:
                problem.add_eq(coeffs, rhs)
            else:
                problem.add_geq(coeffs, rhs)
    return problem, na, nb


def _order_feasible(law_mu, law_nu, tighten, method) -> FeasibilityReport:
    problem, na, nb = _order_lp(law_mu, law_nu, tighten)
    solution = ratlp.feasible(problem)
    if solution.status == ratlp.INFEASIBLE:
        return FeasibilityReport(False, method, farkas=solution.farkas)
    coupling = tuple(
        tuple(solution.primal[l * na + a] for a in range(na)) for l in range(nb)
    )
    return FeasibilityReport(True, method, order_witness=coupling)


def icx_order_feasible(law_mu: DerivativeLaw, law_nu: DerivativeLaw) -> FeasibilityReport:
    """Increasing convex order between the derivative laws, certified by a
    coupling whose conditional source barycenters dominate each target atom."""
    return _order_feasible(law_mu, law_nu, tighten=False, method="icx-order")


def cx_order_feasible(
    law_mu: DerivativeLaw,
    law_nu: DerivativeLaw,
    mu: DiscreteVectorMeasure = None,
    nu: DiscreteVectorMeasure = None,
) -> FeasibilityReport:
    """Convex order via a martingale coupling; valid for balanced tuples only.

    When the originating measures are passed, their componentwise totals are
    checked; otherwise the laws' barycenters are compared, which the balanced
    case makes equivalent.
    """
    if mu is not None and nu is not None:
        if mu.component_totals() != nu.component_totals():
            raise UnbalancedInput("convex-order test requires equal component masses")
    else:
        d = len(law_mu.atoms[0])
        bary = lambda law: tuple(
            sum((m * z[j] for z, m in zip(law.atoms, law.masses)), ZERO)
            for j in range(d)
        )
        if bary(law_mu) != bary(law_nu):
            raise UnbalancedInput("derivative laws have different barycenters")
    return _order_feasible(law_mu, law_nu, tighten=True, method="cx-order")


def constant_kernel_witness(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure):
    """Witness for the mass-dominance sufficient condition.

    When min_j mu_j(X) is at least the total of the atomwise maximum of the
    target components, the constant kernel sending every source point to the
    normalized maximum measure covers the target. Returns the kernel, or None
    when the condition does not hold.
    """
    if mu.d != nu.d:
        raise DimensionMismatch("tuples must share d")
    peak = [max(nu.weights[j][k] for j in range(nu.d)) for k in range(nu.n)]
    peak_total = sum(peak, ZERO)
    if min(mu.component_totals()) < peak_total:
        return None
    row = tuple(p / peak_total for p in peak)
    kernel = TransportKernel([row] * mu.n)
    if not kernel.covers(mu, nu):
        return None
    return kernel


INCREASING_LOG_CONCAVE = "IncreasingLogConcave"
DECREASING_LOG_CONVEX = "DecreasingLogConvex"
NEITHER = "NeitherInfeasible"


@dataclass
class SigmaScheduleReport:
    classification: str
    sufficient: bool
    note: Optional[str] = None


def gaussian_markov_check(variances) -> SigmaScheduleReport:
    """Classify a centered-Gaussian standard-deviation schedule from its variances.

    Works entirely on sigma_t^2 so irrational schedules like (8,4,2,sqrt2,1)
    stay rational: sigma increasing log-concave is equivalent to s nondecreasing
    with s_{t+1}^2 >= s_t s_{t+2}, and decreasing log-convex to the reversed
    inequalities. The condition is necessary for a time-homogeneous transport
    through the schedule; it is sufficient only for schedules of length 3,
    which the `sufficient` flag reflects. Length-2 schedules fall outside the
    criterion and are reported with a note and sufficient=False.
    """
    s = [parse_rational(v) for v in variances]
    if len(s) < 2:
        raise NonPositiveSigma("need at least two variances")
    if any(v <= 0 for v in s):
        raise NonPositiveSigma("variances must be positive")
    T = len(s)
    nondecreasing = all(s[t] <= s[t + 1] for t in range(T - 1))
    nonincreasing = all(s[t] >= s[t + 1] for t in range(T - 1))
    log_concave = all(s[t + 1] ** 2 >= s[t] * s[t + 2] for t in range(T - 2))
    log_convex = all(s[t + 1] ** 2 <= s[t] * s[t + 2] for t in range(T - 2))
    if nondecreasing and log_concave:
        classification = INCREASING_LOG_CONCAVE
    elif nonincreasing and log_convex:
        classification = DECREASING_LOG_CONVEX
    else:
        classification = NEITHER
    if T == 2:
        return SigmaScheduleReport(
            classification, False, note="not covered for T=2; criterion needs T>=3"
        )
    return SigmaScheduleReport(classification, T == 3 and classification != NEITHER)
