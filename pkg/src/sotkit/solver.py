"""Core simultaneous-transport optimizer over kernel variables.

The LP lives in the row-stochastic kernel entries kappa(i, k): every
source row sums to one, and for every component j and target k the pushed
mass sum_i kappa(i,k) mu_j(x_i) must cover nu_j(y_k). Posing the problem
in kernel rather than plan variables keeps it valid for any reference
measure that is merely absolutely continuous w.r.t. the source average:
points with zero reference weight still carry their coverage constraints.

Balanced instances tighten the coverage inequalities to equalities at any
feasible point; solve_sot checks that exactly instead of assuming it.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from . import ratlp
from .errors import DimensionMismatch, InputError, SotError
from .measures import DiscreteVectorMeasure, ReferenceMeasure
from .rational import parse_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class CostMatrix:
    """Nonnegative n x m rational cost matrix with an optional generator tag."""

    def __init__(self, entries, tag: Optional[str] = None, allow_negative: bool = False):
        self.entries = tuple(
            tuple(parse_rational(v) for v in row) for row in entries
        )
        if not self.entries:
            raise InputError("cost matrix must not be empty")
        width = len(self.entries[0])
        for row in self.entries:
            if len(row) != width:
                raise InputError("cost matrix rows must have equal length")
            if not allow_negative and any(v < 0 for v in row):
                raise InputError("cost entries must be nonnegative")
        self.tag = tag

    @property
    def n(self):
        return len(self.entries)

    @property
    def m(self):
        return len(self.entries[0])

    def __getitem__(self, i):
        return self.entries[i]

    @classmethod
    def euclidean_power(cls, source, target, p: int = 2):
        """|x-y|^p on point coordinates; exact whenever the power is rational."""
        from .twoway import metric_power_cost

        return metric_power_cost(source, target, Fraction(p))


class TransportKernel:
    """Row-stochastic matrix from source points to target points."""

    def __init__(self, matrix):
        self.matrix = tuple(tuple(parse_rational(v) for v in row) for row in matrix)
        for row in self.matrix:
            if any(v < 0 for v in row):
                raise InputError("kernel entries must be nonnegative")
            if sum(row, ZERO) != 1:
                raise InputError("kernel rows must sum to one")

    @property
    def n(self):
        return len(self.matrix)

    @property
    def m(self):
        return len(self.matrix[0]) if self.matrix else 0

    def __getitem__(self, i):
        return self.matrix[i]

    def pushforward(self, mu: DiscreteVectorMeasure):
        """Componentwise image measure weights: (kappa_# mu)_j(y_k)."""
        return tuple(
            tuple(
                sum((self.matrix[i][k] * mu.weights[j][i] for i in range(mu.n)), ZERO)
                for k in range(self.m)
            )
            for j in range(mu.d)
        )

    def covers(self, mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure) -> bool:
        pushed = self.pushforward(mu)
        return all(
            pushed[j][k] >= nu.weights[j][k]
            for j in range(nu.d)
            for k in range(nu.n)
        )


@dataclass
class SolveResult:
    status: str  # "optimal" or "infeasible"
    optimal_cost: Optional[Fraction] = None
    kernel: Optional[TransportKernel] = None
    plan: Optional[tuple] = None
    is_balanced: bool = False
    farkas: Optional[list] = None

    @property
    def feasible(self) -> bool:
        return self.status == ratlp.OPTIMAL


def _check_pair(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure):
    if mu.d != nu.d:
        raise DimensionMismatch(f"source has d={mu.d}, target has d={nu.d}")


def is_balanced(mu, nu) -> bool:
    return mu.component_totals() == nu.component_totals()


def resolve_eta(mu, eta) -> ReferenceMeasure:
    if eta is None:
        return ReferenceMeasure.mubar_of(mu)
    if isinstance(eta, ReferenceMeasure):
        if eta.n != mu.n:
            raise InputError("reference measure size does not match source support")
        return eta
    return ReferenceMeasure.from_weights(eta, mu)


def kernel_lp(
    mu: DiscreteVectorMeasure,
    nu: DiscreteVectorMeasure,
    objective=None,
    coverage: str = ratlp.GEQ,
) -> ratlp.RationalLpProblem:
    """Kernel-variable LP; variable (i,k) sits at index i*m + k.

    Row order: n row-sum equalities, then d*m coverage rows (component-major).
    """
    _check_pair(mu, nu)
    n, m, d = mu.n, nu.n, mu.d
    problem = ratlp.RationalLpProblem(n * m, objective)
    for i in range(n):
        problem.add_eq([(i * m + k, ONE) for k in range(m)], ONE)
    for j in range(d):
        for k in range(m):
            coeffs = [
                (i * m + k, mu.weights[j][i])
                for i in range(n)
                if mu.weights[j][i] != 0
            ]
            if coverage == ratlp.GEQ:
                problem.add_geq(coeffs, nu.weights[j][k])
            else:
                problem.add_eq(coeffs, nu.weights[j][k])
    return problem


def kernel_objective(eta: ReferenceMeasure, cost: CostMatrix, negate=False):
    n, m = cost.n, cost.m
    sign = -ONE if negate else ONE
    return [sign * eta.weights[i] * cost[i][k] for i in range(n) for k in range(m)]


def _kernel_from_primal(primal, n, m) -> TransportKernel:
    return TransportKernel([[primal[i * m + k] for k in range(m)] for i in range(n)])


def solve_sot(
    mu: DiscreteVectorMeasure,
    nu: DiscreteVectorMeasure,
    eta=None,
    cost: CostMatrix = None,
    maximize: bool = False,
) -> SolveResult:
    """Exact optimal simultaneous transport; infeasibility is a status, never a number."""
    _check_pair(mu, nu)
    eta = resolve_eta(mu, eta)
    if cost is None:
        raise InputError("solve_sot needs a cost matrix")
    if cost.n != mu.n or cost.m != nu.n:
        raise InputError("cost matrix shape does not match supports")
    problem = kernel_lp(mu, nu, kernel_objective(eta, cost, negate=maximize))
    solution = ratlp.solve(problem)
    if solution.status == ratlp.INFEASIBLE:
        return SolveResult(status=ratlp.INFEASIBLE, farkas=solution.farkas)
    if solution.status != ratlp.OPTIMAL:  # bounded by construction
        raise SotError("internal error: kernel polytope is bounded")
    n, m = mu.n, nu.n
    kernel = _kernel_from_primal(solution.primal, n, m)
    balanced = is_balanced(mu, nu)
    if balanced:
        pushed = kernel.pushforward(mu)
        for j in range(mu.d):
            for k in range(m):
                if pushed[j][k] != nu.weights[j][k]:
                    raise SotError(
                        "internal error: balanced instance with slack coverage"
                    )
    plan = tuple(
        tuple(eta.weights[i] * kernel[i][k] for k in range(m)) for i in range(n)
    )
    value = solution.objective_value if not maximize else -solution.objective_value
    return SolveResult(
        status=ratlp.OPTIMAL,
        optimal_cost=value,
        kernel=kernel,
        plan=plan,
        is_balanced=balanced,
    )


def solve_sot_monotone_check(
    mu: DiscreteVectorMeasure,
    nu: DiscreteVectorMeasure,
    cost: CostMatrix,
    scales: Sequence,
    eta=None,
) -> List[Fraction]:
    """Optimal cost of (mu, t * nu) for each scale t; used by the continuity check."""
    values = []
    for t in scales:
        t = parse_rational(t)
        if t <= 0 or t > 1:
            raise InputError("scales must lie in (0, 1]")
        result = solve_sot(mu, nu.scaled(t), eta, cost)
        if not result.feasible:
            raise InputError(f"instance infeasible at scale {t}")
        values.append(result.optimal_cost)
    return values


@dataclass
class DecomposableCostReport:
    is_invariant: bool
    min_cost: Fraction
    max_cost: Fraction


def decomposable_cost_check(mu, nu, eta, cost) -> DecomposableCostReport:
    """Solve min and max of the same objective; equal values mean the cost is
    decomposable on this instance (every transport costs the same)."""
    low = solve_sot(mu, nu, eta, cost)
    if not low.feasible:
        raise InputError("decomposable-cost check needs a feasible instance")
    high = solve_sot(mu, nu, eta, cost, maximize=True)
    return DecomposableCostReport(
        is_invariant=low.optimal_cost == high.optimal_cost,
        min_cost=low.optimal_cost,
        max_cost=high.optimal_cost,
    )
