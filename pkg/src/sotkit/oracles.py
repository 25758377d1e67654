"""Independent brute-force oracles used by the test suite.

These deliberately share no pivot code with the simplex in ratlp:
vertex_enumerate solves every basis subset by Gaussian elimination,
classic_ot is a self-contained transportation simplex with a north-west
corner start, enumerate_maps tries every Monge map, and
kernel_grid_search scans row-stochastic kernels on a rational grid.
Correctness anchors only; nothing here is tuned for speed.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import List, Optional

from .errors import TooLarge, UnbalancedInput
from .ratlp import EQ, GEQ, INFEASIBLE, OPTIMAL, RationalLpProblem

ZERO = Fraction(0)
ONE = Fraction(1)

MAX_ORACLE_VARS = 12
MAX_ORACLE_ROWS = 10


@dataclass
class OracleResult:
    status: str
    value: Optional[Fraction] = None
    witness: Optional[list] = None
    enumerated: int = 0


def _row_reduce(matrix):
    """In-place fraction Gaussian elimination; returns pivot columns or None if 0=c."""
    rows = len(matrix)
    cols = len(matrix[0]) - 1
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = next((k for k in range(r, rows) if matrix[k][c] != 0), None)
        if pivot_row is None:
            continue
        matrix[r], matrix[pivot_row] = matrix[pivot_row], matrix[r]
        inv = ONE / matrix[r][c]
        matrix[r] = [v * inv for v in matrix[r]]
        for k in range(rows):
            if k != r and matrix[k][c] != 0:
                f = matrix[k][c]
                matrix[k] = [a - f * b for a, b in zip(matrix[k], matrix[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for k in range(r, rows):
        if matrix[k][-1] != 0:
            return None  # 0 = nonzero: inconsistent system
    return pivots, r


def _solve_square(matrix, cols, rhs):
    """Solve the square system over the selected columns; None if singular."""
    k = len(cols)
    aug = [[matrix[r][c] for c in cols] + [rhs[r]] for r in range(k)]
    for i in range(k):
        piv = next((r for r in range(i, k) if aug[r][i] != 0), None)
        if piv is None:
            return None
        aug[i], aug[piv] = aug[piv], aug[i]
        inv = ONE / aug[i][i]
        aug[i] = [v * inv for v in aug[i]]
        for r in range(k):
            if r != i and aug[r][i] != 0:
                f = aug[r][i]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[i])]
    return [aug[i][-1] for i in range(k)]


def vertex_enumerate(problem: RationalLpProblem) -> OracleResult:
    """Minimum over all basic feasible solutions of the standard-form polyhedron."""
    if problem.num_vars > MAX_ORACLE_VARS or problem.num_rows > MAX_ORACLE_ROWS:
        raise TooLarge("vertex enumeration limited to 12 variables and 10 rows")
    geq_rows = [i for i, row in enumerate(problem.rows) if row.kind == GEQ]
    surplus_of = {ri: problem.num_vars + k for k, ri in enumerate(geq_rows)}
    n = problem.num_vars + len(geq_rows)
    dense = []
    for i, row in enumerate(problem.rows):
        line = [ZERO] * (n + 1)
        for col, coef in row.coeffs:
            line[col] = coef
        if row.kind == GEQ:
            line[surplus_of[i]] = -ONE
        line[-1] = row.rhs
        dense.append(line)
    if not dense:
        return OracleResult(OPTIMAL, ZERO, [ZERO] * problem.num_vars, 1)
    reduced = _row_reduce(dense)
    if reduced is None:
        return OracleResult(INFEASIBLE)
    _, rank = reduced
    dense = dense[:rank]
    rhs = [line[-1] for line in dense]
    best = None
    count = 0
    for cols in combinations(range(n), rank):
        count += 1
        sol = _solve_square(dense, cols, rhs)
        if sol is None or any(v < 0 for v in sol):
            continue
        x = [ZERO] * n
        for c, v in zip(cols, sol):
            x[c] = v
        value = sum(
            (problem.objective[j] * x[j] for j in range(problem.num_vars)), ZERO
        )
        if best is None or value < best[0]:
            best = (value, x[: problem.num_vars])
    if best is None:
        return OracleResult(INFEASIBLE, enumerated=count)
    return OracleResult(OPTIMAL, best[0], best[1], count)


def _northwest_basis(supply, demand):
    """North-west corner start; returns exactly n+m-1 basic cells (some may be zero)."""
    s = list(supply)
    d = list(demand)
    n, m = len(s), len(d)
    cells = []
    i = k = 0
    while True:
        f = min(s[i], d[k])
        cells.append([i, k, f])
        s[i] -= f
        d[k] -= f
        if i == n - 1 and k == m - 1:
            break
        if s[i] == 0 and i < n - 1:
            i += 1
        else:
            k += 1
    return cells


def classic_ot(mu1d, nu1d, cost) -> OracleResult:
    """Balanced d=1 transportation simplex, MODI multipliers, Bland anti-cycling.

    mu1d and nu1d are sequences of nonnegative rationals with equal totals,
    cost an n x m matrix. Independent of the ratlp simplex by construction.
    """
    supply = [Fraction(v) for v in mu1d]
    demand = [Fraction(v) for v in nu1d]
    if any(v < 0 for v in supply) or any(v < 0 for v in demand):
        raise UnbalancedInput("marginals must be nonnegative")
    if sum(supply, ZERO) != sum(demand, ZERO):
        raise UnbalancedInput("classic transport needs equal total masses")
    n, m = len(supply), len(demand)
    if n == 0 or m == 0:
        return OracleResult(OPTIMAL, ZERO, [], 0)
    basis = _northwest_basis(supply, demand)
    iterations = 0
    while True:
        iterations += 1
        in_basis = {(i, k) for i, k, _ in basis}
        # multipliers from the spanning tree, u[0] anchored at zero
        u = [None] * n
        v = [None] * m
        u[0] = ZERO
        changed = True
        while changed:
            changed = False
            for i, k, _ in basis:
                if u[i] is not None and v[k] is None:
                    v[k] = cost[i][k] - u[i]
                    changed = True
                elif v[k] is not None and u[i] is None:
                    u[i] = cost[i][k] - v[k]
                    changed = True
        entering = None
        for i in range(n):
            for k in range(m):
                if (i, k) not in in_basis and cost[i][k] - u[i] - v[k] < 0:
                    entering = (i, k)
                    break
            if entering:
                break
        if entering is None:
            break
        cycle = _find_cycle(basis, entering)
        # odd positions lose flow; theta is their minimum
        losers = cycle[1::2]
        theta = min(f for _, _, f in losers)
        leave_candidates = [(i, k) for i, k, f in losers if f == theta]
        leaving = min(leave_candidates)
        flows = {(i, k): f for i, k, f in basis}
        flows[entering] = ZERO
        for pos, (i, k, f) in enumerate(cycle):
            flows[(i, k)] = f + theta if pos % 2 == 0 else f - theta
        del flows[leaving]
        basis = [[i, k, f] for (i, k), f in sorted(flows.items())]
    value = sum((f * cost[i][k] for i, k, f in basis), ZERO)
    plan = [[ZERO] * m for _ in range(n)]
    for i, k, f in basis:
        plan[i][k] = f
    return OracleResult(OPTIMAL, value, plan, iterations)


def _find_cycle(basis, entering):
    """Unique cycle closed by the entering cell in the basis spanning tree.

    Returns cells in cycle order starting with the entering cell, so signs
    alternate +,-,+,- along the returned list.
    """
    flows = {(i, k): f for i, k, f in basis}
    by_row = {}
    by_col = {}
    for i, k, _ in basis:
        by_row.setdefault(i, []).append(k)
        by_col.setdefault(k, []).append(i)
    start_i, start_k = entering
    # walk the tree from row start_i back to column start_k, alternating
    stack = [(start_i, "row", [])]
    seen = set()
    while stack:
        node, kind, path = stack.pop()
        if (node, kind) in seen:
            continue
        seen.add((node, kind))
        if kind == "row":
            for k in sorted(by_row.get(node, [])):
                if k == start_k:
                    cells = path + [(node, k)]
                    return _cycle_cells(cells, entering, flows)
                stack.append((k, "col", path + [(node, k)]))
        else:
            for i in sorted(by_col.get(node, [])):
                stack.append((i, "row", path + [(i, node)]))
    raise AssertionError("basis is not a spanning tree")


def _cycle_cells(path_cells, entering, flows):
    cycle = [(entering[0], entering[1], ZERO)]
    # path_cells alternates row-leg / column-leg starting in entering's row
    for i, k in path_cells:
        cycle.append((i, k, flows[(i, k)]))
    return cycle


def enumerate_maps(mu, nu, eta_weights, cost) -> OracleResult:
    """Exhaustive minimum over every map from source points to target points."""
    n, m = mu.n, nu.n
    if m**n > 4_000_000:
        raise TooLarge("map enumeration limited to m^n <= 4e6")
    best = None
    count = 0
    for assignment in product(range(m), repeat=n):
        count += 1
        ok = True
        for j in range(mu.d):
            for k in range(m):
                covered = sum(
                    (mu.weights[j][i] for i in range(n) if assignment[i] == k), ZERO
                )
                if covered < nu.weights[j][k]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        value = sum(
            (eta_weights[i] * cost[i][assignment[i]] for i in range(n)), ZERO
        )
        if best is None or value < best[0]:
            best = (value, list(assignment))
    if best is None:
        return OracleResult(INFEASIBLE, enumerated=count)
    return OracleResult(OPTIMAL, best[0], best[1], count)


def _simplex_grid(m, steps):
    """All probability rows over m targets with denominators dividing steps."""
    if m == 1:
        yield (ONE,)
        return
    for split in combinations(range(steps + m - 1), m - 1):
        counts = []
        prev = -1
        for s in split:
            counts.append(s - prev - 1)
            prev = s
        counts.append(steps + m - 2 - prev)
        yield tuple(Fraction(c, steps) for c in counts)


def kernel_grid_search(mu, nu, eta_weights, objective, steps=20, maximize=True):
    """Scan row-stochastic kernels on the grid; None if no feasible grid point."""
    n, m = mu.n, nu.n
    rows = list(_simplex_grid(m, steps))
    if len(rows) ** n > 2_000_000:
        raise TooLarge("kernel grid too large")
    best = None
    count = 0
    for choice in product(rows, repeat=n):
        count += 1
        ok = True
        for j in range(mu.d):
            for k in range(m):
                pushed = sum(
                    (choice[i][k] * mu.weights[j][i] for i in range(n)), ZERO
                )
                if pushed < nu.weights[j][k]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        value = sum(
            (eta_weights[i] * choice[i][k] * objective[i][k] for i in range(n) for k in range(m)),
            ZERO,
        )
        if best is None or (value > best[0] if maximize else value < best[0]):
            best = (value, [list(r) for r in choice])
    if best is None:
        return OracleResult(INFEASIBLE, enumerated=count)
    return OracleResult(OPTIMAL, best[0], best[1], count)
