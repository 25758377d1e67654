"""Lower bounds on the optimal simultaneous-transport cost from d=1 solves.

Two families: scalarization (any nonnegative combination of the component
constraints must itself be transported, so the best single-measure cost
over a simplex grid of combination weights is a bound) and the
positive-part bound for balanced instances whose cost has a zero in every
row (mass where component i exceeds component j must come from mass where
the same excess holds at the source).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .errors import InputError, UnbalancedInput
from .measures import DiscreteVectorMeasure
from .rational import parse_rational
from .solver import CostMatrix, is_balanced, resolve_eta, solve_sot

ZERO = Fraction(0)
ONE = Fraction(1)

SIMPLEX_SCALARIZATION = "SimplexScalarization"
POSITIVE_PART = "PositivePart"


@dataclass
class BoundReport:
    kind: str
    value: Optional[Fraction]  # None when infinite or not applicable
    infinite: bool = False  # True certifies the instance itself is infeasible
    applicable: bool = True
    detail: dict = field(default_factory=dict)


def simplex_grid(d: int, grid: int):
    """All rational weight vectors on the d-simplex with denominator `grid`."""
    if d == 1:
        return [(ONE,)]
    points = []
    for split in combinations(range(grid + d - 1), d - 1):
        counts = []
        prev = -1
        for s in split:
            counts.append(s - prev - 1)
            prev = s
        counts.append(grid + d - 2 - prev)
        points.append(tuple(Fraction(c, grid) for c in counts))
    return points


def default_grid(d: int) -> int:
    return 8 if d <= 2 else 4


def _scalarized(measure: DiscreteVectorMeasure, lam):
    weights = [
        sum((lam[j] * measure.weights[j][i] for j in range(measure.d)), ZERO)
        for i in range(measure.n)
    ]
    return measure.single_component(weights)


def simplex_bound(mu, nu, eta=None, cost: CostMatrix = None, grid: Optional[int] = None) -> BoundReport:
    """Best d=1 bound over the weight grid; monotone under grid refinement."""
    if cost is None:
        raise InputError("simplex_bound needs a cost matrix")
    eta = resolve_eta(mu, eta)
    if grid is None:
        grid = default_grid(mu.d)
    if grid < 1:
        raise InputError("grid must be a positive integer")
    best = None
    best_lam = None
    for lam in simplex_grid(mu.d, grid):
        if all(v == 0 for v in lam):
            continue
        sub = solve_sot(_scalarized(mu, lam), _scalarized(nu, lam), eta, cost)
        if not sub.feasible:
            # a scalarized requirement that cannot be met certifies infeasibility
            return BoundReport(
                SIMPLEX_SCALARIZATION,
                None,
                infinite=True,
                detail={"lambda": lam},
            )
        if best is None or sub.optimal_cost > best:
            best = sub.optimal_cost
            best_lam = lam
    return BoundReport(SIMPLEX_SCALARIZATION, best, detail={"lambda": best_lam, "grid": grid})


def _positive_part(mu, i, j):
    return [
        max(mu.weights[i][col] - mu.weights[j][col], ZERO) for col in range(mu.n)
    ]


def _one_dim_cost(mu, nu, eta, cost, source_w, target_w):
    """Unbalanced d=1 optimum from raw weight vectors, with degenerate cases."""
    total_target = sum(target_w, ZERO)
    if total_target == 0:
        return ZERO  # zero rows of cost let leftover reference mass park free
    if sum(source_w, ZERO) < total_target:
        return None  # infeasible: not enough excess mass at the source
    sub = solve_sot(
        mu.single_component(source_w), nu.single_component(target_w), eta, cost
    )
    if not sub.feasible:
        return None
    return sub.optimal_cost


def positive_part_bound(mu, nu, eta=None, cost: CostMatrix = None) -> BoundReport:
    """Pairwise excess-mass bound for balanced instances.

    Needs min_k c(i, k) = 0 for every source point i (otherwise the report is
    marked not applicable). A pair whose target excess outweighs the source
    excess makes the bound (and the instance) infeasible.
    """
    if cost is None:
        raise InputError("positive_part_bound needs a cost matrix")
    if not is_balanced(mu, nu):
        raise UnbalancedInput("positive-part bound requires a balanced instance")
    eta = resolve_eta(mu, eta)
    for i in range(mu.n):
        if min(cost[i][k] for k in range(cost.m)) != 0:
            return BoundReport(
                POSITIVE_PART,
                None,
                applicable=False,
                detail={"reason": f"row {i} of the cost has no zero entry"},
            )
    best = None
    best_pair = None
    for i in range(mu.d):
        for j in range(i + 1, mu.d):
            forward = _one_dim_cost(
                mu, nu, eta, cost, _positive_part(mu, i, j), _positive_part(nu, i, j)
            )
            backward = _one_dim_cost(
                mu, nu, eta, cost, _positive_part(mu, j, i), _positive_part(nu, j, i)
            )
            if forward is None or backward is None:
                return BoundReport(
                    POSITIVE_PART,
                    None,
                    infinite=True,
                    detail={"pair": (i, j)},
                )
            value = forward + backward
            if best is None or value > best:
                best = value
                best_pair = (i, j)
    if best is None:  # d = 1 has no pairs; the bound degenerates to zero
        best = ZERO
    return BoundReport(POSITIVE_PART, best, detail={"pair": best_pair})
