"""Dual potentials, gap certification, the two-way dual, and equilibria.

For balanced instances with a reference equivalent to the source average,
the potentials are read off the kernel LP multipliers and the duality gap
is certified to be exactly zero. When the reference is merely absolutely
continuous, strong duality is not claimed: a separate LP maximizes over
the measure-form potential class (whose constraints at zero-reference
points degenerate to psi . mu(x) <= 0) and the result is a certified
one-sided lower bound that may sit strictly below the primal optimum.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import ratlp
from .errors import InputError, ReferenceNotEquivalent, SotError, UnbalancedInput
from .measures import DiscreteVectorMeasure, ReferenceMeasure
from .solver import (
    CostMatrix,
    TransportKernel,
    is_balanced,
    kernel_lp,
    kernel_objective,
    resolve_eta,
    solve_sot,
)
from .twoway import same_class

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class DualCertificate:
    phi: tuple  # potential over source points
    psi: tuple  # d x m potentials over target points
    dual_value: Fraction
    primal_value: Fraction
    gap: Fraction  # primal - dual; zero in the equivalent-reference regime
    one_sided: bool = False  # True when only the lower-bound inequality is claimed
    finite_lp_attainment: bool = True  # suprema of finite LPs are always attained


def _phi_convention(i, cost):
    # value at a zero-reference point; does not enter the dual value
    return min(cost[i][k] for k in range(cost.m))


def dual_certificate(mu, nu, eta=None, cost: CostMatrix = None) -> DualCertificate:
    """Potentials certifying the optimum of a feasible balanced instance.

    With an equivalent reference the gap is exactly zero. Otherwise the
    one-sided certificate described in the module docstring is returned.
    """
    if cost is None:
        raise InputError("dual_certificate needs a cost matrix")
    if not is_balanced(mu, nu):
        raise UnbalancedInput("duality requires a balanced instance")
    eta = resolve_eta(mu, eta)
    primal = solve_sot(mu, nu, eta, cost)
    if not primal.feasible:
        raise InputError("dual_certificate needs a feasible instance")
    if eta.equivalence_flag:
        return _duals_from_lp(mu, nu, eta, cost, primal.optimal_cost)
    return _one_sided_bound(mu, nu, eta, cost, primal.optimal_cost)


def _duals_from_lp(mu, nu, eta, cost, primal_value) -> DualCertificate:
    problem = kernel_lp(mu, nu, kernel_objective(eta, cost))
    solution = ratlp.solve(problem)
    if solution.status != ratlp.OPTIMAL:
        raise SotError("internal error: primal solved but dual pass failed")
    n, m, d = mu.n, nu.n, mu.d
    alpha = solution.duals[:n]
    psi = tuple(
        tuple(solution.duals[n + j * m + k] for k in range(m)) for j in range(d)
    )
    phi = tuple(
        alpha[i] / eta.weights[i] if eta.weights[i] > 0 else _phi_convention(i, cost)
        for i in range(n)
    )
    dual_value = _dual_value(phi, psi, eta, nu)
    gap = primal_value - dual_value
    if gap != 0:
        raise SotError("internal error: nonzero gap with equivalent reference")
    cert = DualCertificate(phi, psi, dual_value, primal_value, gap)
    if not verify_dual_feasibility(cert, mu, eta, cost):
        raise SotError("internal error: LP duals fail potential feasibility")
    return cert


def _dual_value(phi, psi, eta, nu) -> Fraction:
    value = sum((p * w for p, w in zip(phi, eta.weights)), ZERO)
    for j in range(nu.d):
        value += sum((psi[j][k] * nu.weights[j][k] for k in range(nu.n)), ZERO)
    return value


def _one_sided_bound(mu, nu, eta, cost, primal_value) -> DualCertificate:
    """Best measure-form lower bound: maximize phi.eta + psi.nu subject to
    phi(x)eta(x) + psi(y).mu(x) <= c(x,y)eta(x) at every pair."""
    n, m, d = mu.n, nu.n, mu.d
    pos_rows = [i for i in range(n) if eta.weights[i] > 0]
    phi_index = {i: idx for idx, i in enumerate(pos_rows)}
    n_phi = len(pos_rows)
    # variables: phi+ phi- (n_phi each), psi+ psi- (d*m each)
    psi_base = 2 * n_phi
    num = 2 * n_phi + 2 * d * m
    objective = [ZERO] * num
    for i in pos_rows:
        objective[phi_index[i]] = -eta.weights[i]
        objective[n_phi + phi_index[i]] = eta.weights[i]
    for j in range(d):
        for k in range(m):
            objective[psi_base + j * m + k] = -nu.weights[j][k]
            objective[psi_base + d * m + j * m + k] = nu.weights[j][k]
    problem = ratlp.RationalLpProblem(num, objective)
    for i in range(n):
        for k in range(m):
            coeffs = []
            if eta.weights[i] > 0:
                coeffs.append((phi_index[i], -eta.weights[i]))
                coeffs.append((n_phi + phi_index[i], eta.weights[i]))
            for j in range(d):
                w = mu.weights[j][i]
                if w != 0:
                    coeffs.append((psi_base + j * m + k, -w))
                    coeffs.append((psi_base + d * m + j * m + k, w))
            problem.add_geq(coeffs, -cost[i][k] * eta.weights[i])
    solution = ratlp.solve(problem)
    if solution.status != ratlp.OPTIMAL:
        raise SotError("internal error: one-sided bound LP must be solvable")
    x = solution.primal
    phi = tuple(
        (x[phi_index[i]] - x[n_phi + phi_index[i]])
        if eta.weights[i] > 0
        else _phi_convention(i, cost)
        for i in range(n)
    )
    psi = tuple(
        tuple(
            x[psi_base + j * m + k] - x[psi_base + d * m + j * m + k]
            for k in range(m)
        )
        for j in range(d)
    )
    dual_value = -solution.objective_value
    gap = primal_value - dual_value
    if gap < 0:
        raise SotError("internal error: lower bound exceeds the optimum")
    return DualCertificate(phi, psi, dual_value, primal_value, gap, one_sided=True)


def verify_dual_feasibility(cert: DualCertificate, mu, eta, cost) -> bool:
    """Re-check every potential inequality exactly, independent of the LP path.

    phi(x) + psi(y) . (dmu/deta)(x) <= c(x,y) at all pairs with positive
    reference mass.
    """
    eta = resolve_eta(mu, eta)
    for i in range(mu.n):
        if eta.weights[i] == 0:
            continue
        ratio = tuple(mu.weights[j][i] / eta.weights[i] for j in range(mu.d))
        for k in range(cost.m):
            lhs = cert.phi[i] + sum(
                (cert.psi[j][k] * ratio[j] for j in range(mu.d)), ZERO
            )
            if lhs > cost[i][k]:
                return False
    return True


@dataclass
class TwowayDualResult:
    phi: tuple
    psi_scalar: tuple
    value: Fraction


def twoway_dual(mu, nu, cost: CostMatrix) -> TwowayDualResult:
    """Scalar-potential dual for two-way instances: phi(x) + psi(y) <= c(x,y)
    is only required on pairs whose derivative profiles match.

    Both optima are attained; the value equals the primal optimum with the
    average source measure as reference.
    """
    ok, decomposition = same_class(mu, nu)
    if not ok:
        from .errors import NotTwoWay

        raise NotTwoWay(decomposition.reason)
    mu_t, nu_t = decomposition.mu, decomposition.nu
    cost = decomposition.restrict_cost(cost)
    n, m = mu_t.n, nu_t.n
    mb, nb = mu_t.mubar(), nu_t.mubar()
    # free potentials, split into positive and negative parts
    num = 2 * (n + m)
    objective = [ZERO] * num
    for i in range(n):
        objective[i] = -mb[i]
        objective[n + i] = mb[i]
    for k in range(m):
        objective[2 * n + k] = -nb[k]
        objective[2 * n + m + k] = nb[k]
    problem = ratlp.RationalLpProblem(num, objective)
    for sl in decomposition.slices:
        for i in sl.x_members:
            for k in sl.y_members:
                problem.add_geq(
                    [
                        (i, -ONE),
                        (n + i, ONE),
                        (2 * n + k, -ONE),
                        (2 * n + m + k, ONE),
                    ],
                    -cost[i][k],
                )
    solution = ratlp.solve(problem)
    if solution.status != ratlp.OPTIMAL:
        raise SotError("internal error: two-way dual LP must be solvable")
    x = solution.primal
    phi = tuple(x[i] - x[n + i] for i in range(n))
    psi = tuple(x[2 * n + k] - x[2 * n + m + k] for k in range(m))
    return TwowayDualResult(phi, psi, -solution.objective_value)


@dataclass
class EquilibriumAssignment:
    wage: tuple  # over source points (workers)
    profit_per_skill: tuple  # d x m over target points (firms)
    matching: tuple  # plan eta(x) kappa(x, y)
    kernel: TransportKernel
    production_value: Fraction


def equilibrium(mu, nu, eta=None, production=None) -> EquilibriumAssignment:
    """Wages and per-skill profits supporting an optimal matching.

    Maximizes total production over matchings, reads the supporting prices
    from the dual, and verifies stability (no worker-firm pair can improve)
    plus the on-support budget identity wage + profit . skills = production.
    """
    if production is None:
        raise InputError("equilibrium needs a production matrix")
    if not isinstance(production, CostMatrix):
        production = CostMatrix(production, allow_negative=True)
    if not is_balanced(mu, nu):
        raise UnbalancedInput("the matching market must clear componentwise")
    eta = resolve_eta(mu, eta)
    if not eta.equivalence_flag:
        raise ReferenceNotEquivalent(
            "equilibrium prices need a reference equivalent to the worker average"
        )
    n, m, d = mu.n, nu.n, mu.d
    objective = [
        -eta.weights[i] * production[i][k] for i in range(n) for k in range(m)
    ]
    problem = kernel_lp(mu, nu, objective)
    solution = ratlp.solve(problem)
    if solution.status == ratlp.INFEASIBLE:
        raise InputError("no feasible matching exists")
    if solution.status != ratlp.OPTIMAL:
        raise SotError("internal error: matching polytope is bounded")
    kernel = TransportKernel(
        [[solution.primal[i * m + k] for k in range(m)] for i in range(n)]
    )
    production_value = -solution.objective_value
    wage = tuple(
        -solution.duals[i] / eta.weights[i] if eta.weights[i] > 0 else ZERO
        for i in range(n)
    )
    profit = tuple(
        tuple(-solution.duals[n + j * m + k] for k in range(m)) for j in range(d)
    )
    plan = tuple(
        tuple(eta.weights[i] * kernel[i][k] for k in range(m)) for i in range(n)
    )
    _verify_equilibrium(mu, eta, production, wage, profit, plan)
    return EquilibriumAssignment(wage, profit, plan, kernel, production_value)


def _verify_equilibrium(mu, eta, production, wage, profit, plan):
    for i in range(mu.n):
        if eta.weights[i] == 0:
            continue
        skills = tuple(mu.weights[j][i] / eta.weights[i] for j in range(mu.d))
        for k in range(production.m):
            offered = wage[i] + sum(
                (profit[j][k] * skills[j] for j in range(mu.d)), ZERO
            )
            if offered < production[i][k]:
                raise SotError("internal error: equilibrium stability violated")
            if plan[i][k] > 0 and offered != production[i][k]:
                raise SotError("internal error: budget identity violated on support")
