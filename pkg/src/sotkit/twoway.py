"""Two-way transport: slice decomposition, comonotone closed form, distances.

Two tuples are in the same class when their derivative laws coincide. A
shared law slices both supports into matching profile groups; every
feasible kernel then stays inside its slice, the optimal cost is the
law-weighted sum of per-slice classic transport costs, and for submodular
scalar costs each slice is solved in closed form by the sorted quantile
coupling. The p-Wasserstein distance between same-class tuples is the
decomposition applied to the metric power cost, certified on p-th powers.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from . import ratlp
from .errors import (
    InputError,
    MissingCoords,
    NotSubmodular,
    NotTwoWay,
    UnbalancedInput,
)
from .measures import DiscreteVectorMeasure, group_profiles
from .rational import close, parse_rational
from .solver import CostMatrix, TransportKernel

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class Slice:
    profile: tuple
    mass: Fraction  # shared law mass P(z)
    x_members: tuple
    y_members: tuple
    mu_conditional: tuple  # probability weights on x_members
    nu_conditional: tuple  # probability weights on y_members


@dataclass
class SliceDecomposition:
    slices: List[Slice]
    mu: DiscreteVectorMeasure  # trimmed copies the indices refer to
    nu: DiscreteVectorMeasure
    mu_kept: tuple  # original source indices surviving the trim, in order
    nu_kept: tuple

    def restrict_cost(self, cost: CostMatrix) -> CostMatrix:
        """Cost rows/columns for the trimmed supports, given the original matrix."""
        if cost.n == self.mu.n and cost.m == self.nu.n:
            return cost
        return CostMatrix(
            [[cost[i][k] for k in self.nu_kept] for i in self.mu_kept],
            tag=cost.tag,
            allow_negative=True,
        )


@dataclass
class ClassMismatch:
    reason: str
    mu_law: object
    nu_law: object


def _prepare(mu, nu):
    mu_kept = tuple(mu.trim_indices())
    nu_kept = tuple(nu.trim_indices())
    mu = mu.trim()
    nu = nu.trim()
    if mu.d != nu.d:
        raise NotTwoWay("tuples with different d are never equivalent")
    return mu, nu, mu_kept, nu_kept


def same_class(mu: DiscreteVectorMeasure, nu: DiscreteVectorMeasure, mode="exact"):
    """Compare derivative laws; on success return the paired slice decomposition.

    The returned decomposition references trimmed copies of the inputs
    (zero-mass points belong to no slice). Returns (True, SliceDecomposition)
    or (False, ClassMismatch).
    """
    mu, nu, mu_kept, nu_kept = _prepare(mu, nu)
    if mode == "float":
        # cluster both profile sets jointly so near-equal atoms pair up
        pm = mu.derivative_profile().vectors
        pn = nu.derivative_profile().vectors
        law = group_profiles(pm + pn, mu.mubar() + nu.mubar(), mode)
        slices = []
        for atom, mass, members in zip(law.atoms, law.masses, law.members):
            xs = tuple(i for i in members if i < mu.n)
            ys = tuple(i - mu.n for i in members if i >= mu.n)
            mu_mass = sum((mu.mubar()[i] for i in xs), ZERO)
            nu_mass = sum((nu.mubar()[k] for k in ys), ZERO)
            if not xs or not ys or not close(mu_mass, nu_mass, mode):
                return False, ClassMismatch(
                    f"slice {tuple(map(float, atom))} has unmatched mass",
                    mu.derivative_law(mode),
                    nu.derivative_law(mode),
                )
            slices.append((atom, mu_mass, xs, ys))
    else:
        law_mu = mu.derivative_law()
        law_nu = nu.derivative_law()
        if law_mu != law_nu:
            return False, ClassMismatch("derivative laws differ", law_mu, law_nu)
        nu_members = dict(zip(law_nu.atoms, law_nu.members))
        slices = [
            (atom, mass, members, nu_members[atom])
            for atom, mass, members in zip(law_mu.atoms, law_mu.masses, law_mu.members)
        ]
    mb, nb = mu.mubar(), nu.mubar()
    built = []
    for atom, mass, xs, ys in slices:
        built.append(
            Slice(
                profile=atom,
                mass=mass,
                x_members=tuple(xs),
                y_members=tuple(ys),
                mu_conditional=tuple(mb[i] / mass for i in xs),
                nu_conditional=tuple(nb[k] / mass for k in ys),
            )
        )
    return True, SliceDecomposition(built, mu, nu, mu_kept, nu_kept)


def _require_two_way(mu, nu, mode="exact") -> SliceDecomposition:
    ok, result = same_class(mu, nu, mode)
    if not ok:
        raise NotTwoWay(result.reason)
    return result


def classic_ot_lp(row_weights, col_weights, cost_rows):
    """Balanced d=1 transport by LP over plan entries; returns (value, plan)."""
    n, m = len(row_weights), len(col_weights)
    if sum(row_weights, ZERO) != sum(col_weights, ZERO):
        raise UnbalancedInput("classic transport needs equal masses")
    problem = ratlp.RationalLpProblem(
        n * m, [cost_rows[i][k] for i in range(n) for k in range(m)]
    )
    for i in range(n):
        problem.add_eq([(i * m + k, ONE) for k in range(m)], row_weights[i])
    for k in range(m):
        problem.add_eq([(i * m + k, ONE) for i in range(n)], col_weights[k])
    solution = ratlp.solve(problem)
    if solution.status != ratlp.OPTIMAL:
        raise InputError("classic transport subproblem unexpectedly infeasible")
    plan = [
        [solution.primal[i * m + k] for k in range(m)] for i in range(n)
    ]
    return solution.objective_value, plan


@dataclass
class DecomposeResult:
    total: Fraction
    per_slice: list  # (profile, slice cost) pairs
    kernel: TransportKernel
    decomposition: SliceDecomposition


def _assemble_kernel(decomposition, slice_plans):
    mu, nu = decomposition.mu, decomposition.nu
    matrix = [[ZERO] * nu.n for _ in range(mu.n)]
    for sl, plan in zip(decomposition.slices, slice_plans):
        for a, i in enumerate(sl.x_members):
            row_mass = sl.mu_conditional[a]
            for b, k in enumerate(sl.y_members):
                matrix[i][k] = plan[a][b] / row_mass
    return TransportKernel(matrix)


def decompose_solve(mu, nu, cost: CostMatrix, mode="exact") -> DecomposeResult:
    """Optimal two-way transport as one classic problem per profile slice.

    total = sum over slices of P(z) * (classic optimum between the slice
    conditionals); the assembled block kernel attains it for the full
    problem with the average source measure as reference.
    """
    decomposition = _require_two_way(mu, nu, mode)
    cost = decomposition.restrict_cost(cost)
    total = ZERO
    per_slice = []
    plans = []
    for sl in decomposition.slices:
        sub_cost = [
            [cost[i][k] for k in sl.y_members] for i in sl.x_members
        ]
        value, plan = classic_ot_lp(sl.mu_conditional, sl.nu_conditional, sub_cost)
        per_slice.append((sl.profile, value))
        plans.append(plan)
        total += sl.mass * value
    kernel = _assemble_kernel(decomposition, plans)
    return DecomposeResult(total, per_slice, kernel, decomposition)


def check_submodular(source_support, target_support, cost: CostMatrix):
    """Exact submodularity of the cost on the scalar support grid."""
    xs = [(p.require_scalar_coord(), i) for i, p in enumerate(source_support)]
    ys = [(q.require_scalar_coord(), k) for k, q in enumerate(target_support)]
    for cx, i in xs:
        for cx2, i2 in xs:
            if cx > cx2:
                continue
            for cy, k in ys:
                for cy2, k2 in ys:
                    if cy > cy2:
                        continue
                    if cost[i][k] + cost[i2][k2] > cost[i][k2] + cost[i2][k]:
                        raise NotSubmodular(
                            f"violated at x={cx},{cx2} y={cy},{cy2}"
                        )


def northwest_quantile(row_weights, col_weights):
    """Comonotone (north-west corner) coupling of two sorted discrete laws."""
    plan = [[ZERO] * len(col_weights) for _ in row_weights]
    remaining_r = list(row_weights)
    remaining_c = list(col_weights)
    i = k = 0
    while i < len(remaining_r) and k < len(remaining_c):
        f = min(remaining_r[i], remaining_c[k])
        plan[i][k] = f
        remaining_r[i] -= f
        remaining_c[k] -= f
        if remaining_r[i] == 0 and remaining_c[k] == 0:
            i += 1
            k += 1
        elif remaining_r[i] == 0:
            i += 1
        else:
            k += 1
    return plan


@dataclass
class ComonotoneResult:
    total: Fraction
    per_slice: list
    kernel: TransportKernel


def comonotone_solve(mu, nu, cost: CostMatrix, mode="exact") -> ComonotoneResult:
    """Closed-form two-way optimum for submodular scalar costs.

    Sorts each slice by coordinate (ties by support index; tied points are
    interchangeable under the metric) and couples quantiles with the
    north-west corner rule; no LP is solved.
    """
    decomposition = _require_two_way(mu, nu, mode)
    mu_t, nu_t = decomposition.mu, decomposition.nu
    cost = decomposition.restrict_cost(cost)
    check_submodular(mu_t.support, nu_t.support, cost)
    total = ZERO
    per_slice = []
    plans = []
    for sl in decomposition.slices:
        x_order = sorted(
            range(len(sl.x_members)),
            key=lambda a: (mu_t.support[sl.x_members[a]].require_scalar_coord(), sl.x_members[a]),
        )
        y_order = sorted(
            range(len(sl.y_members)),
            key=lambda b: (nu_t.support[sl.y_members[b]].require_scalar_coord(), sl.y_members[b]),
        )
        sorted_plan = northwest_quantile(
            [sl.mu_conditional[a] for a in x_order],
            [sl.nu_conditional[b] for b in y_order],
        )
        plan = [[ZERO] * len(sl.y_members) for _ in sl.x_members]
        value = ZERO
        for ai, a in enumerate(x_order):
            for bi, b in enumerate(y_order):
                f = sorted_plan[ai][bi]
                if f:
                    plan[a][b] = f
                    value += f * cost[sl.x_members[a]][sl.y_members[b]]
        per_slice.append((sl.profile, value))
        plans.append(plan)
        total += sl.mass * value
    kernel = _assemble_kernel(decomposition, plans)
    return ComonotoneResult(total, per_slice, kernel)


def _sqrt_exact(value: Fraction):
    """Exact rational square root, or None when irrational."""
    if value < 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


def metric_power_cost(source_support, target_support, p: Fraction) -> CostMatrix:
    """Euclidean distance to the power p as an exact cost matrix.

    Exact for even integer p always, and for odd integer p when every
    pairwise squared distance is a perfect rational square (scalar supports
    in particular). Raises otherwise instead of approximating.
    """
    p = parse_rational(p)
    if p < 1 or p.denominator != 1:
        raise InputError("p must be an integer >= 1 for exact metric powers")
    p = int(p)
    rows = []
    for x in source_support:
        if x.coords is None:
            raise MissingCoords(f"point {x.label!r} has no coordinates")
        row = []
        for y in target_support:
            if y.coords is None:
                raise MissingCoords(f"point {y.label!r} has no coordinates")
            if len(x.coords) != len(y.coords):
                raise InputError("coordinate dimensions differ between points")
            sq = sum(((a - b) ** 2 for a, b in zip(x.coords, y.coords)), ZERO)
            if p % 2 == 0:
                row.append(sq ** (p // 2))
            else:
                root = _sqrt_exact(sq)
                if root is None:
                    raise InputError(
                        "odd metric power is irrational on this support; use an even p"
                    )
                row.append(root**p)
        rows.append(row)
    return CostMatrix(rows, tag=f"euclidean^{p}")


@dataclass
class WassersteinResult:
    p: Fraction
    power: Fraction  # exact p-th power of the distance
    distance: float  # display value, float root of the exact power
    per_slice: list


def wasserstein(mu, nu, p=2, mode="exact") -> WassersteinResult:
    """p-Wasserstein distance between same-class tuples via the decomposition.

    The certified quantity is the exact p-th power; the root is display-only.
    """
    p = parse_rational(p)
    decomposition = _require_two_way(mu, nu, mode)
    cost = metric_power_cost(decomposition.mu.support, decomposition.nu.support, p)
    result = decompose_solve(decomposition.mu, decomposition.nu, cost, mode)
    return WassersteinResult(
        p=p,
        power=result.total,
        distance=float(result.total) ** (1.0 / float(p)),
        per_slice=result.per_slice,
    )


def wd_lower_bound(mu, nu, p=2, mode="exact") -> Fraction:
    """Componentwise lower bound on the p-th power of the distance.

    Mass-weighted average of the d classic per-component transport powers;
    equals (1/d) * sum_j W_p(mu_j, nu_j)^p when the components are
    probabilities.
    """
    p = parse_rational(p)
    ok, decomposition = same_class(mu, nu, mode)
    if not ok:
        raise NotTwoWay(decomposition.reason)
    mu_t, nu_t = decomposition.mu, decomposition.nu
    cost = metric_power_cost(mu_t.support, nu_t.support, p)
    total_mass = mu_t.total_mass()
    bound = ZERO
    for j in range(mu_t.d):
        mass = sum(mu_t.weights[j], ZERO)
        if mass != sum(nu_t.weights[j], ZERO):
            raise UnbalancedInput("components must have equal masses pairwise")
        value, _ = classic_ot_lp(
            [w / mass for w in mu_t.weights[j]],
            [w / mass for w in nu_t.weights[j]],
            cost.entries,
        )
        bound += mass * value
    return bound / total_mass


def max_offslice_mass(mu, nu, mode="exact") -> Fraction:
    """Maximum total plan mass a feasible kernel can place across mismatched
    slices; zero certifies the slice-confinement property."""
    decomposition = _require_two_way(mu, nu, mode)
    mu_t, nu_t = decomposition.mu, decomposition.nu
    slice_of_x = {}
    slice_of_y = {}
    for s_idx, sl in enumerate(decomposition.slices):
        for i in sl.x_members:
            slice_of_x[i] = s_idx
        for k in sl.y_members:
            slice_of_y[k] = s_idx
    mb = mu_t.mubar()
    objective = [
        -(mb[i] if slice_of_x[i] != slice_of_y[k] else ZERO)
        for i in range(mu_t.n)
        for k in range(nu_t.n)
    ]
    from .solver import kernel_lp

    problem = kernel_lp(mu_t, nu_t, objective)
    solution = ratlp.solve(problem)
    if solution.status != ratlp.OPTIMAL:
        raise NotTwoWay("no feasible kernel on a two-way instance")
    return -solution.objective_value
